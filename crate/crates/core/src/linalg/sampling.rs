//! Column sampling proportional to squared column norms.

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;

use super::DenseMatrix;
use crate::error::{Error, Result};

/// Sample `count` distinct column indices of `a` without replacement, with
/// probability proportional to the squared column norm.
pub fn leverage_sample_columns<R: Rng + ?Sized>(
    a: &DenseMatrix,
    count: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    let cols = a.ncols();
    if count > cols {
        return Err(Error::Argument(format!(
            "cannot sample {count} of {cols} columns"
        )));
    }
    let mut weights: Vec<f64> = (0..cols)
        .map(|j| a.column(j).iter().map(|v| v * v).sum())
        .collect();
    if weights.iter().sum::<f64>() == 0.0 {
        return Err(Error::Numerical(
            "degenerate distribution: all columns zero".into(),
        ));
    }

    let mut picked = Vec::with_capacity(count);
    for _ in 0..count {
        let dist = WeightedIndex::new(&weights).map_err(|_| {
            Error::Numerical("degenerate distribution: remaining columns zero".into())
        })?;
        let j = dist.sample(rng);
        picked.push(j);
        weights[j] = 0.0;
    }
    Ok(picked)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn point_mass_is_always_picked() {
        let mut a = Array2::<f64>::zeros((3, 5));
        a[[1, 3]] = 2.0;
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..50 {
            assert_eq!(leverage_sample_columns(&a, 1, &mut rng).unwrap(), vec![3]);
        }
    }

    #[test]
    fn exhaustive_sample_returns_all_indices() {
        let a = Array2::<f64>::ones((2, 6));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut got = leverage_sample_columns(&a, 6, &mut rng).unwrap();
        got.sort_unstable();
        assert_eq!(got, vec![0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn marginal_frequency_matches_squared_norms() {
        // Squared norms (1, 3) -> p(col 1) = 0.75.
        let mut a = Array2::<f64>::zeros((2, 2));
        a[[0, 0]] = 1.0;
        a[[0, 1]] = 3f64.sqrt();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let draws = 100_000;
        let mut hits = 0usize;
        for _ in 0..draws {
            if leverage_sample_columns(&a, 1, &mut rng).unwrap()[0] == 1 {
                hits += 1;
            }
        }
        let freq = hits as f64 / draws as f64;
        assert!((0.74..=0.76).contains(&freq), "frequency {freq}");
    }

    #[test]
    fn distinct_indices_and_chi_square_fit() {
        let mut a = Array2::<f64>::zeros((1, 4));
        let sq = [1.0f64, 2.0, 3.0, 4.0];
        for (j, &w) in sq.iter().enumerate() {
            a[[0, j]] = w.sqrt();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        // Distinctness within one draw set.
        for _ in 0..200 {
            let picked = leverage_sample_columns(&a, 3, &mut rng).unwrap();
            let mut sorted = picked.clone();
            sorted.sort_unstable();
            sorted.dedup();
            assert_eq!(sorted.len(), 3);
        }
        // Goodness of fit for the single-draw marginal at 1e5 draws;
        // chi-square with 3 dof stays under 16.27 (p = 0.001) for a
        // correct sampler.
        let draws = 100_000usize;
        let mut counts = [0usize; 4];
        for _ in 0..draws {
            counts[leverage_sample_columns(&a, 1, &mut rng).unwrap()[0]] += 1;
        }
        let total: f64 = sq.iter().sum();
        let chi2: f64 = sq
            .iter()
            .zip(counts.iter())
            .map(|(&w, &c)| {
                let expected = draws as f64 * w / total;
                let d = c as f64 - expected;
                d * d / expected
            })
            .sum();
        assert!(chi2 < 16.27, "chi-square statistic {chi2}");
    }

    #[test]
    fn zero_matrix_rejected() {
        let a = Array2::<f64>::zeros((3, 3));
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        assert!(matches!(
            leverage_sample_columns(&a, 1, &mut rng),
            Err(Error::Numerical(_))
        ));
    }
}
