//! Iterative gradient-sign perturbation steering a prediction toward a
//! chosen class while staying on the density-image manifold.

use crate::error::{Error, Result};
use crate::imaging::{GridKind, Label, PixelGrid};
use crate::net::{forward, input_gradient, NetworkParameters, Prediction};
use crate::BOX_LENGTH;
use ndarray::Array2;

/// Outcome of one attack.
#[derive(Debug, Clone)]
pub struct AttackResult {
    pub iterations: usize,
    pub success: bool,
    /// Max absolute pixel change divided by the maximum of the original
    /// image.
    pub linf_rel: f64,
    pub before: Prediction,
    pub after: Prediction,
    /// The perturbed image (density, renormalized).
    pub perturbed: Array2<f32>,
}

/// Gradient-sign steps of size `step_rel * max(image)` toward
/// `target`, clamping pixels nonnegative and renormalizing the density
/// after every step. Stops at the first label flip or after `max_iters`.
pub fn adversarial_attack(
    net: &NetworkParameters,
    image: &PixelGrid,
    target: Label,
    step_rel: f64,
    max_iters: usize,
) -> Result<AttackResult> {
    if image.kind() != GridKind::Density {
        return Err(Error::InvalidInput(
            "the attack operates on density images".into(),
        ));
    }
    let r = image.resolution();
    let cell = (BOX_LENGTH / r as f64).powi(2) as f32;
    let original = image.to_f32();
    let before = forward(net, &original)?;
    let max0 = original.iter().cloned().fold(0.0f32, f32::max);
    if max0 <= 0.0 {
        return Err(Error::InvalidInput("image is identically zero".into()));
    }
    let target_class = target.class_index();

    let mut x = original.clone();
    let mut result = AttackResult {
        iterations: 0,
        success: before.class_index() == target_class,
        linf_rel: 0.0,
        before,
        after: before,
        perturbed: x.clone(),
    };
    if result.success {
        // nothing to flip; report the degenerate outcome
        result.success = false;
        return Ok(result);
    }

    let step = (step_rel as f32) * max0;
    for iter in 1..=max_iters {
        let grad = input_gradient(net, &x, target_class)?;
        // descend the loss toward the target label
        x.zip_mut_with(&grad, |v, &g| {
            *v -= step * g.signum();
            if *v < 0.0 {
                *v = 0.0;
            }
        });
        let sum: f64 = x.iter().map(|&v| v as f64).sum::<f64>() * cell as f64;
        if sum > 0.0 {
            let f = (1.0 / sum) as f32;
            x.mapv_inplace(|v| v * f);
        }
        let pred = forward(net, &x)?;
        result.iterations = iter;
        result.after = pred;
        if pred.class_index() == target_class {
            result.success = true;
            break;
        }
    }
    result.linf_rel = x
        .iter()
        .zip(original.iter())
        .map(|(&a, &b)| (a - b).abs() as f64)
        .fold(0.0, f64::max)
        / max0 as f64;
    result.perturbed = x;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::{random_image, NoiseDistribution};
    use crate::net::{he_init, ArchitectureSpec};

    fn toy_net() -> NetworkParameters {
        he_init(
            &ArchitectureSpec {
                input_resolution: 16,
                conv1_filters: 2,
                conv1_kernel: 3,
                conv2_filters: 3,
                conv2_kernel: 3,
                dense1_width: 8,
            },
            31,
        )
    }

    #[test]
    fn zero_step_never_flips() {
        let net = toy_net();
        let img = random_image(16, 0.3, NoiseDistribution::Gaussian, 8).unwrap();
        let before = forward(&net, &img.to_f32()).unwrap();
        let target = if before.is_integrable() {
            Label::NonIntegrable
        } else {
            Label::Integrable
        };
        let result = adversarial_attack(&net, &img, target, 0.0, 20).unwrap();
        assert!(!result.success);
        assert_eq!(result.iterations, 20);
        assert_eq!(result.linf_rel, 0.0);
    }

    #[test]
    fn attack_reports_flip_against_weak_net() {
        // a freshly initialized net has a fragile decision boundary
        let net = toy_net();
        let mut flipped = 0;
        for seed in 0..8u64 {
            let img = random_image(16, 0.3, NoiseDistribution::Gaussian, 100 + seed).unwrap();
            let before = forward(&net, &img.to_f32()).unwrap();
            let target = if before.is_integrable() {
                Label::NonIntegrable
            } else {
                Label::Integrable
            };
            let result = adversarial_attack(&net, &img, target, 5e-3, 300).unwrap();
            if result.success {
                flipped += 1;
                assert_ne!(result.after.class_index(), before.class_index());
                assert!(result.iterations <= 300);
            }
            assert!(result.linf_rel >= 0.0);
            // pixels stay nonnegative and normalized
            assert!(result.perturbed.iter().all(|&v| v >= 0.0));
        }
        assert!(flipped > 0, "no attack succeeded at all");
    }

    #[test]
    fn already_target_label_is_degenerate() {
        let net = toy_net();
        let img = random_image(16, 0.3, NoiseDistribution::Gaussian, 9).unwrap();
        let before = forward(&net, &img.to_f32()).unwrap();
        let target = if before.is_integrable() {
            Label::Integrable
        } else {
            Label::NonIntegrable
        };
        let result = adversarial_attack(&net, &img, target, 1e-3, 10).unwrap();
        assert!(!result.success);
        assert_eq!(result.iterations, 0);
    }
}
