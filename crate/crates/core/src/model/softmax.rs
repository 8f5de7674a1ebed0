use super::ModelError;

/// `log(sum(exp(v)))`, computed with max subtraction.
pub fn log_sum_exp(v: &[f64]) -> f64 {
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + v.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Maps real vectors to probability vectors: `exp(v_i) / sum_j exp(v_j)`.
pub fn softmax(v: &[f64]) -> Result<Vec<f64>, ModelError> {
    if v.iter().any(|x| !x.is_finite()) {
        return Err(ModelError::NonFiniteInput);
    }
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = v.iter().map(|x| (x - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    Ok(exps.into_iter().map(|e| e / total).collect())
}

/// Elementwise log of [`softmax`].
pub fn log_softmax(v: &[f64]) -> Vec<f64> {
    let lse = log_sum_exp(v);
    v.iter().map(|x| x - lse).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn uniform_for_equal_inputs() {
        let p = softmax(&[0.0, 0.0, 0.0]).unwrap();
        for x in p {
            assert!((x - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn matches_direct_exp_normalize() {
        // exp(1), exp(2), exp(3) normalized; reference values from a
        // 50-digit computation
        let expected = [
            0.090_030_573_170_380_46,
            0.244_728_471_054_797_64,
            0.665_240_955_774_821_9,
        ];
        let p = softmax(&[1.0, 2.0, 3.0]).unwrap();
        for (a, b) in p.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_non_finite() {
        assert!(matches!(softmax(&[1.0, f64::NAN]), Err(ModelError::NonFiniteInput)));
        assert!(matches!(softmax(&[f64::INFINITY]), Err(ModelError::NonFiniteInput)));
    }

    #[test]
    fn large_inputs_do_not_overflow() {
        let p = softmax(&[1000.0, 1000.0]).unwrap();
        assert_eq!(p, vec![0.5, 0.5]);
    }

    proptest! {
        #[test]
        fn shift_invariant_and_normalized(
            v in proptest::collection::vec(-30.0f64..30.0, 1..20),
            c in -50.0f64..50.0,
        ) {
            let p = softmax(&v).unwrap();
            let shifted: Vec<f64> = v.iter().map(|x| x + c).collect();
            let q = softmax(&shifted).unwrap();
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            for (a, b) in p.iter().zip(&q) {
                prop_assert!(*a >= 0.0);
                prop_assert!((a - b).abs() < 1e-12);
            }
        }
    }
}
