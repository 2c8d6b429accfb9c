//! Counting helpers: factorials, binomials, compositions and contingency tables.

use num_bigint::BigUint;
use num_traits::One;

/// `ln(n!)` by direct summation, exact to rounding for the sizes used here.
pub fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Table of `ln(k!)` for `k = 0..=max`.
pub fn ln_factorial_table(max: u32) -> Vec<f64> {
    let mut table = Vec::with_capacity(max as usize + 1);
    let mut acc = 0.0;
    table.push(0.0);
    for k in 1..=max {
        acc += (k as f64).ln();
        table.push(acc);
    }
    table
}

pub fn factorial_f64(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

pub fn binomial_big(n: u32, k: u32) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for j in 0..k {
        acc *= n - j;
        acc /= j + 1;
    }
    acc
}

/// Binomial coefficient, saturating at `u128::MAX`.
pub fn binomial_u128(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for j in 0..k {
        acc = match acc.checked_mul((n - j) as u128) {
            Some(v) => v / (j as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

pub fn binomial_f64(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, j| acc * f64::from(n - j) / f64::from(j + 1))
}

/// Number of compositions of `total` into `parts` non-negative parts.
pub fn composition_count(parts: usize, total: u32) -> u128 {
    if parts == 0 {
        return u128::from(total == 0);
    }
    binomial_u128(total as u64 + parts as u64 - 1, parts as u64 - 1)
}

/// All compositions of `total` into `parts` non-negative parts, in
/// lexicographic order.
pub fn compositions(parts: usize, total: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    if parts == 0 {
        if total == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    let mut current = vec![0u32; parts];
    fill_compositions(&mut current, 0, total, &mut out);
    out
}

fn fill_compositions(current: &mut [u32], pos: usize, remaining: u32, out: &mut Vec<Vec<u32>>) {
    if pos + 1 == current.len() {
        current[pos] = remaining;
        out.push(current.to_vec());
        return;
    }
    for v in 0..=remaining {
        current[pos] = v;
        fill_compositions(current, pos + 1, remaining - v, out);
    }
}

/// Visit every non-negative integer matrix `table[row][col]` whose row sums
/// are `row_sums` and column sums are `col_sums`.
pub fn for_each_contingency_table<F>(row_sums: &[u32], col_sums: &[u32], mut visit: F)
where
    F: FnMut(&[Vec<u32>]),
{
    let total_rows: u32 = row_sums.iter().sum();
    let total_cols: u32 = col_sums.iter().sum();
    if total_rows != total_cols {
        return;
    }
    let mut table = vec![vec![0u32; col_sums.len()]; row_sums.len()];
    let mut capacity = col_sums.to_vec();
    table_rows(row_sums, &mut capacity, &mut table, 0, &mut visit);
}

fn table_rows<F>(
    row_sums: &[u32],
    capacity: &mut [u32],
    table: &mut [Vec<u32>],
    row: usize,
    visit: &mut F,
) where
    F: FnMut(&[Vec<u32>]),
{
    if row == row_sums.len() {
        if capacity.iter().all(|&c| c == 0) {
            visit(table);
        }
        return;
    }
    table_cells(row_sums, capacity, table, row, 0, row_sums[row], visit);
}

fn table_cells<F>(
    row_sums: &[u32],
    capacity: &mut [u32],
    table: &mut [Vec<u32>],
    row: usize,
    col: usize,
    remaining: u32,
    visit: &mut F,
) where
    F: FnMut(&[Vec<u32>]),
{
    let cols = capacity.len();
    if col + 1 == cols {
        if remaining <= capacity[col] {
            table[row][col] = remaining;
            capacity[col] -= remaining;
            table_rows(row_sums, capacity, table, row + 1, visit);
            capacity[col] += remaining;
        }
        return;
    }
    let hi = remaining.min(capacity[col]);
    for v in 0..=hi {
        table[row][col] = v;
        capacity[col] -= v;
        table_cells(row_sums, capacity, table, row, col + 1, remaining - v, visit);
        capacity[col] += v;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compositions_small() {
        assert_eq!(compositions(2, 2), vec![vec![0, 2], vec![1, 1], vec![2, 0]]);
        assert_eq!(compositions(4, 2).len(), 10);
        assert_eq!(compositions(6, 9).len(), 2002);
        assert_eq!(compositions(3, 0), vec![vec![0, 0, 0]]);
        assert_eq!(composition_count(6, 9), 2002);
        assert_eq!(composition_count(6, 15), 15504);
    }

    #[test]
    fn compositions_are_sorted() {
        let all = compositions(4, 5);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(all.len() as u128, composition_count(4, 5));
    }

    #[test]
    fn contingency_tables_2x2() {
        // Margins (2,1) x (1,2): tables [[0,2],[1,0]] and [[1,1],[0,1]].
        let mut seen = Vec::new();
        for_each_contingency_table(&[2, 1], &[1, 2], |t| seen.push(t.to_vec()));
        assert_eq!(seen.len(), 2);
        for t in &seen {
            assert_eq!(t[0][0] + t[0][1], 2);
            assert_eq!(t[0][0] + t[1][0], 1);
        }
    }

    #[test]
    fn contingency_tables_mismatched_margins() {
        let mut count = 0;
        for_each_contingency_table(&[2], &[1], |_| count += 1);
        assert_eq!(count, 0);
    }

    #[test]
    fn binomials_agree() {
        for n in 0..40u32 {
            for k in 0..=n {
                let big = binomial_big(n, k);
                assert_eq!(big.to_string(), binomial_u128(n as u64, k as u64).to_string());
                let f = binomial_f64(n, k);
                assert!((f - binomial_u128(n as u64, k as u64) as f64).abs() <= 1e-12 * f);
            }
        }
    }

    #[test]
    fn ln_factorials() {
        let table = ln_factorial_table(20);
        for n in 0..=20u32 {
            assert!((table[n as usize] - factorial_f64(n).ln()).abs() < 1e-12);
            assert!((ln_factorial(n) - table[n as usize]).abs() < 1e-12);
        }
    }
}
