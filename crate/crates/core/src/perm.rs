//! Permutation helpers shared by the enumerating solvers.

/// Advances `xs` to its lexicographic successor. Returns false (leaving `xs`
/// sorted ascending) when `xs` was the last permutation.
pub fn next_lex<T: Ord>(xs: &mut [T]) -> bool {
    if xs.len() < 2 {
        return false;
    }
    let mut i = xs.len() - 1;
    while i > 0 && xs[i - 1] >= xs[i] {
        i -= 1;
    }
    if i == 0 {
        xs.reverse();
        return false;
    }
    let mut j = xs.len() - 1;
    while xs[j] <= xs[i - 1] {
        j -= 1;
    }
    xs.swap(i - 1, j);
    xs[i..].reverse();
    true
}

/// All permutations of `xs` in lexicographic order of positions in `xs`.
pub fn all_orders(xs: &[usize]) -> Vec<Vec<usize>> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    let mut out = vec![xs.to_vec()];
    while next_lex(&mut idx) {
        out.push(idx.iter().map(|&i| xs[i]).collect());
    }
    out
}

pub fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumerates_in_order() {
        let mut v = vec![1, 2, 3];
        let mut seen = vec![v.clone()];
        while next_lex(&mut v) {
            seen.push(v.clone());
        }
        assert_eq!(seen.len(), 6);
        assert_eq!(seen[1], vec![1, 3, 2]);
        assert_eq!(v, vec![1, 2, 3]);
        assert_eq!(all_orders(&[5, 4]), vec![vec![5, 4], vec![4, 5]]);
        assert_eq!(all_orders(&[]), vec![Vec::<usize>::new()]);
        assert_eq!(factorial(5), 120);
    }
}
