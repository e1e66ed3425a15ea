//! Nearest-neighbour regression over lag windows of the series itself.

use crate::scalar::Scalar;

/// Averages the successors of the `neighbors` earlier windows closest (in
/// Euclidean distance) to the latest `lags` values. Ties keep the earlier
/// window.
pub(super) fn knn_forecast<T: Scalar>(xs: &[T], lags: usize, neighbors: usize) -> T {
    let n = xs.len();
    let query = &xs[n - lags..];
    let mut scored: Vec<(T, usize)> = (0..n - lags)
        .map(|j| {
            let d2: T = xs[j..j + lags]
                .iter()
                .zip(query)
                .map(|(&a, &b)| (a - b) * (a - b))
                .sum();
            (d2, j)
        })
        .collect();
    scored.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite distances").then(a.1.cmp(&b.1)));
    let k = neighbors.min(scored.len());
    let total: T = scored[..k].iter().map(|&(_, j)| xs[j + lags]).sum();
    total / T::from_count(k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_match_successor_with_one_neighbor() {
        // Window [1,2,3] appears at 0 and at the end; its successor was 9.
        let xs = [1.0, 2.0, 3.0, 9.0, 5.0, 6.0, 1.0, 2.0, 3.0];
        assert_eq!(knn_forecast(&xs, 3, 1), 9.0);
    }

    #[test]
    fn averages_k_successors() {
        let xs = [0.0, 10.0, 0.0, 20.0, 0.0, 30.0, 0.0];
        // Windows of length 1 equal to 0 at j = 0, 2, 4 → successors 10, 20, 30.
        assert_eq!(knn_forecast(&xs, 1, 3), 20.0);
        assert_eq!(knn_forecast(&xs, 1, 100), (10.0 + 0.0 + 20.0 + 0.0 + 30.0 + 0.0) / 6.0);
    }
}
