//! Layer arithmetic: im2col convolutions, 2x2 max pooling, dense layers,
//! softmax cross-entropy, and exact backpropagation through the stack.
//!
//! Feature maps are `(positions, channels)` matrices with row-major spatial
//! positions, so convolutions become one GEMM against an im2col matrix.

use super::{ArchitectureSpec, NetworkParameters, Prediction, NUM_CLASSES};
use crate::error::{Error, Result};
use ndarray::{Array1, Array2, Axis};

/// Scalar of the layer arithmetic. f32 in production, f64 in the
/// finite-difference tests.
pub trait Real: ndarray::NdFloat + num_traits::NumCast {
    fn from_f64(v: f64) -> Self;
    fn into_f64(self) -> f64;
}

impl Real for f32 {
    fn from_f64(v: f64) -> Self {
        v as f32
    }
    fn into_f64(self) -> f64 {
        self as f64
    }
}

impl Real for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }
    fn into_f64(self) -> f64 {
        self
    }
}

/// Weight and bias tensors of the four trainable layers. Convolution
/// weights are `(k*k*in_channels, filters)` im2col matrices with
/// kernel-position-major, channel-minor rows; dense weights are
/// `(inputs, outputs)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Parameters<T> {
    pub conv1_w: Array2<T>,
    pub conv1_b: Array1<T>,
    pub conv2_w: Array2<T>,
    pub conv2_b: Array1<T>,
    pub dense1_w: Array2<T>,
    pub dense1_b: Array1<T>,
    pub dense2_w: Array2<T>,
    pub dense2_b: Array1<T>,
}

pub type Gradients<T> = Parameters<T>;

impl<T: Real> Parameters<T> {
    pub fn zeros_like(spec: &ArchitectureSpec) -> Self {
        let k1 = spec.conv1_kernel * spec.conv1_kernel;
        let k2 = spec.conv2_kernel * spec.conv2_kernel * spec.conv1_filters;
        Parameters {
            conv1_w: Array2::zeros((k1, spec.conv1_filters)),
            conv1_b: Array1::zeros(spec.conv1_filters),
            conv2_w: Array2::zeros((k2, spec.conv2_filters)),
            conv2_b: Array1::zeros(spec.conv2_filters),
            dense1_w: Array2::zeros((spec.flat_dim(), spec.dense1_width)),
            dense1_b: Array1::zeros(spec.dense1_width),
            dense2_w: Array2::zeros((spec.dense1_width, NUM_CLASSES)),
            dense2_b: Array1::zeros(NUM_CLASSES),
        }
    }

    /// Shape consistency against a topology.
    pub fn check_shapes(&self, spec: &ArchitectureSpec) -> Result<()> {
        let k1 = spec.conv1_kernel * spec.conv1_kernel;
        let k2 = spec.conv2_kernel * spec.conv2_kernel * spec.conv1_filters;
        let expect = [
            (self.conv1_w.dim(), (k1, spec.conv1_filters)),
            (self.conv2_w.dim(), (k2, spec.conv2_filters)),
            (self.dense1_w.dim(), (spec.flat_dim(), spec.dense1_width)),
            (self.dense2_w.dim(), (spec.dense1_width, NUM_CLASSES)),
        ];
        for (got, want) in expect {
            if got != want {
                return Err(Error::ShapeMismatch(format!(
                    "parameter tensor is {got:?}, expected {want:?}"
                )));
            }
        }
        if self.conv1_b.len() != spec.conv1_filters
            || self.conv2_b.len() != spec.conv2_filters
            || self.dense1_b.len() != spec.dense1_width
            || self.dense2_b.len() != NUM_CLASSES
        {
            return Err(Error::ShapeMismatch("bias length mismatch".into()));
        }
        Ok(())
    }

    pub fn cast<U: Real>(&self) -> Parameters<U> {
        Parameters {
            conv1_w: self.conv1_w.mapv(|v| U::from_f64(v.into_f64())),
            conv1_b: self.conv1_b.mapv(|v| U::from_f64(v.into_f64())),
            conv2_w: self.conv2_w.mapv(|v| U::from_f64(v.into_f64())),
            conv2_b: self.conv2_b.mapv(|v| U::from_f64(v.into_f64())),
            dense1_w: self.dense1_w.mapv(|v| U::from_f64(v.into_f64())),
            dense1_b: self.dense1_b.mapv(|v| U::from_f64(v.into_f64())),
            dense2_w: self.dense2_w.mapv(|v| U::from_f64(v.into_f64())),
            dense2_b: self.dense2_b.mapv(|v| U::from_f64(v.into_f64())),
        }
    }

    /// Visits every tensor as a mutable flat slice, in a fixed order.
    pub fn for_each_tensor_mut<F: FnMut(&mut [T])>(&mut self, mut f: F) {
        f(self.conv1_w.as_slice_mut().unwrap());
        f(self.conv1_b.as_slice_mut().unwrap());
        f(self.conv2_w.as_slice_mut().unwrap());
        f(self.conv2_b.as_slice_mut().unwrap());
        f(self.dense1_w.as_slice_mut().unwrap());
        f(self.dense1_b.as_slice_mut().unwrap());
        f(self.dense2_w.as_slice_mut().unwrap());
        f(self.dense2_b.as_slice_mut().unwrap());
    }
}

/// Same-padding im2col: output rows are spatial positions, columns run over
/// kernel offsets (major) and input channels (minor).
fn im2col<T: Real>(fm: &Array2<T>, side: usize, k: usize) -> Array2<T> {
    let channels = fm.dim().1;
    let pad = k / 2;
    let mut cols = Array2::<T>::zeros((side * side, k * k * channels));
    for y in 0..side {
        for x in 0..side {
            let row = y * side + x;
            for dy in 0..k {
                let sy = y + dy;
                if sy < pad || sy - pad >= side {
                    continue;
                }
                for dx in 0..k {
                    let sx = x + dx;
                    if sx < pad || sx - pad >= side {
                        continue;
                    }
                    let src = (sy - pad) * side + (sx - pad);
                    let base = (dy * k + dx) * channels;
                    for c in 0..channels {
                        cols[[row, base + c]] = fm[[src, c]];
                    }
                }
            }
        }
    }
    cols
}

/// Adjoint of [`im2col`]: scatter-adds column gradients back onto the
/// feature map.
fn col2im<T: Real>(cols: &Array2<T>, side: usize, k: usize, channels: usize) -> Array2<T> {
    let pad = k / 2;
    let mut fm = Array2::<T>::zeros((side * side, channels));
    for y in 0..side {
        for x in 0..side {
            let row = y * side + x;
            for dy in 0..k {
                let sy = y + dy;
                if sy < pad || sy - pad >= side {
                    continue;
                }
                for dx in 0..k {
                    let sx = x + dx;
                    if sx < pad || sx - pad >= side {
                        continue;
                    }
                    let src = (sy - pad) * side + (sx - pad);
                    let base = (dy * k + dx) * channels;
                    for c in 0..channels {
                        fm[[src, c]] = fm[[src, c]] + cols[[row, base + c]];
                    }
                }
            }
        }
    }
    fm
}

/// 2x2 max pooling with stride 2 (trailing odd row/column dropped).
/// Returns the pooled map and per-cell argmax source positions; ties go to
/// the lowest linear index, which also receives the whole gradient.
fn maxpool<T: Real>(fm: &Array2<T>, side: usize) -> (Array2<T>, Array2<u32>) {
    let channels = fm.dim().1;
    let out_side = side / 2;
    let mut pooled = Array2::<T>::zeros((out_side * out_side, channels));
    let mut argmax = Array2::<u32>::zeros((out_side * out_side, channels));
    for y in 0..out_side {
        for x in 0..out_side {
            let row = y * out_side + x;
            for c in 0..channels {
                let mut best_pos = (2 * y) * side + 2 * x;
                let mut best = fm[[best_pos, c]];
                for (dy, dx) in [(0, 1), (1, 0), (1, 1)] {
                    let pos = (2 * y + dy) * side + (2 * x + dx);
                    let v = fm[[pos, c]];
                    if v > best {
                        best = v;
                        best_pos = pos;
                    }
                }
                pooled[[row, c]] = best;
                argmax[[row, c]] = best_pos as u32;
            }
        }
    }
    (pooled, argmax)
}

fn unpool<T: Real>(
    d_pooled: &Array2<T>,
    argmax: &Array2<u32>,
    positions: usize,
) -> Array2<T> {
    let channels = d_pooled.dim().1;
    let mut d_fm = Array2::<T>::zeros((positions, channels));
    for (row, cell) in d_pooled.rows().into_iter().enumerate() {
        for c in 0..channels {
            let pos = argmax[[row, c]] as usize;
            d_fm[[pos, c]] = d_fm[[pos, c]] + cell[c];
        }
    }
    d_fm
}

fn relu<T: Real>(z: &Array2<T>) -> Array2<T> {
    z.mapv(|v| if v > T::zero() { v } else { T::zero() })
}

fn relu_mask_mul<T: Real>(d: &Array2<T>, z: &Array2<T>) -> Array2<T> {
    let mut out = d.clone();
    out.zip_mut_with(z, |g, &zz| {
        if zz <= T::zero() {
            *g = T::zero();
        }
    });
    out
}

/// Numerically stable softmax and cross-entropy pieces.
fn softmax<T: Real>(logits: &Array1<T>) -> Array1<T> {
    let max = logits.iter().cloned().fold(T::neg_infinity(), T::max);
    let exps = logits.mapv(|v| (v - max).exp());
    let sum = exps.sum();
    exps.mapv(|v| v / sum)
}

fn cross_entropy<T: Real>(logits: &Array1<T>, target: usize) -> T {
    let max = logits.iter().cloned().fold(T::neg_infinity(), T::max);
    let lse = logits.mapv(|v| (v - max).exp()).sum().ln() + max;
    lse - logits[target]
}

/// Everything the backward pass needs from one forward evaluation.
pub struct ForwardTrace<T> {
    cols1: Array2<T>,
    z1: Array2<T>,
    argmax1: Array2<u32>,
    cols2: Array2<T>,
    z2: Array2<T>,
    argmax2: Array2<u32>,
    flat: Array1<T>,
    z_d1: Array1<T>,
    h1: Array1<T>,
    pub logits: Array1<T>,
    pub probs: Array1<T>,
}

fn feature_map<T: Real>(image: &Array2<T>, spec: &ArchitectureSpec) -> Result<Array2<T>> {
    let r = spec.input_resolution;
    if image.dim() != (r, r) {
        return Err(Error::ShapeMismatch(format!(
            "image is {:?}, network expects {r}x{r}",
            image.dim()
        )));
    }
    Ok(image
        .to_owned()
        .into_shape_with_order((r * r, 1))
        .expect("contiguous image"))
}

/// Full forward pass keeping intermediate activations.
pub fn forward_trace<T: Real>(
    params: &Parameters<T>,
    spec: &ArchitectureSpec,
    image: &Array2<T>,
) -> Result<ForwardTrace<T>> {
    params.check_shapes(spec)?;
    let fm0 = feature_map(image, spec)?;
    let r = spec.input_resolution;

    let cols1 = im2col(&fm0, r, spec.conv1_kernel);
    let mut z1 = cols1.dot(&params.conv1_w);
    z1 += &params.conv1_b;
    let a1 = relu(&z1);
    let (p1, argmax1) = maxpool(&a1, r);

    let s1 = spec.pool1_side();
    let cols2 = im2col(&p1, s1, spec.conv2_kernel);
    let mut z2 = cols2.dot(&params.conv2_w);
    z2 += &params.conv2_b;
    let a2 = relu(&z2);
    let (p2, argmax2) = maxpool(&a2, s1);

    let flat = p2
        .into_shape_with_order(spec.flat_dim())
        .expect("contiguous pooled map");
    let z_d1 = flat.dot(&params.dense1_w) + &params.dense1_b;
    let h1 = z_d1.mapv(|v| if v > T::zero() { v } else { T::zero() });
    let logits = h1.dot(&params.dense2_w) + &params.dense2_b;
    let probs = softmax(&logits);
    Ok(ForwardTrace {
        cols1,
        z1,
        argmax1,
        cols2,
        z2,
        argmax2,
        flat,
        z_d1,
        h1,
        logits,
        probs,
    })
}

/// Deterministic forward pass to the two-class prediction.
pub fn forward(net: &NetworkParameters, image: &Array2<f32>) -> Result<Prediction> {
    let trace = forward_trace(&net.params, &net.spec, image)?;
    Ok(Prediction {
        b1: trace.probs[0].into_f64(),
        b2: trace.probs[1].into_f64(),
    })
}

/// What backward should produce besides parameter gradients.
struct BackwardOutput<T> {
    grads: Gradients<T>,
    d_input: Option<Array2<T>>,
}

fn backward<T: Real>(
    params: &Parameters<T>,
    spec: &ArchitectureSpec,
    trace: &ForwardTrace<T>,
    target: usize,
    want_input_gradient: bool,
) -> BackwardOutput<T> {
    let r = spec.input_resolution;
    let s1 = spec.pool1_side();

    // softmax cross-entropy head
    let mut d_logits = trace.probs.clone();
    d_logits[target] = d_logits[target] - T::one();

    let g_dense2_w = outer(&trace.h1, &d_logits);
    let g_dense2_b = d_logits.clone();
    let d_h1 = params.dense2_w.dot(&d_logits);
    let d_zd1 = {
        let mut d = d_h1;
        d.zip_mut_with(&trace.z_d1, |g, &z| {
            if z <= T::zero() {
                *g = T::zero();
            }
        });
        d
    };
    let g_dense1_w = outer(&trace.flat, &d_zd1);
    let g_dense1_b = d_zd1.clone();
    let d_flat = params.dense1_w.dot(&d_zd1);

    let d_p2 = d_flat
        .into_shape_with_order((spec.pool2_side() * spec.pool2_side(), spec.conv2_filters))
        .expect("contiguous");
    let d_a2 = unpool(&d_p2, &trace.argmax2, s1 * s1);
    let d_z2 = relu_mask_mul(&d_a2, &trace.z2);
    let g_conv2_w = trace.cols2.t().dot(&d_z2);
    let g_conv2_b = d_z2.sum_axis(Axis(0));
    let d_cols2 = d_z2.dot(&params.conv2_w.t());
    let d_p1 = col2im(&d_cols2, s1, spec.conv2_kernel, spec.conv1_filters);

    let d_a1 = unpool(&d_p1, &trace.argmax1, r * r);
    let d_z1 = relu_mask_mul(&d_a1, &trace.z1);
    let g_conv1_w = trace.cols1.t().dot(&d_z1);
    let g_conv1_b = d_z1.sum_axis(Axis(0));

    let d_input = if want_input_gradient {
        let d_cols1 = d_z1.dot(&params.conv1_w.t());
        let d_fm0 = col2im(&d_cols1, r, spec.conv1_kernel, 1);
        Some(
            d_fm0
                .into_shape_with_order((r, r))
                .expect("contiguous input gradient"),
        )
    } else {
        None
    };

    BackwardOutput {
        grads: Gradients {
            conv1_w: g_conv1_w,
            conv1_b: g_conv1_b,
            conv2_w: g_conv2_w,
            conv2_b: g_conv2_b,
            dense1_w: g_dense1_w,
            dense1_b: g_dense1_b,
            dense2_w: g_dense2_w,
            dense2_b: g_dense2_b,
        },
        d_input,
    }
}

fn outer<T: Real>(a: &Array1<T>, b: &Array1<T>) -> Array2<T> {
    let mut out = Array2::<T>::zeros((a.len(), b.len()));
    for (i, &ai) in a.iter().enumerate() {
        if ai == T::zero() {
            continue;
        }
        let mut row = out.row_mut(i);
        for (j, &bj) in b.iter().enumerate() {
            row[j] = ai * bj;
        }
    }
    out
}

/// Loss and exact parameter gradients of one example.
pub fn example_gradients<T: Real>(
    params: &Parameters<T>,
    spec: &ArchitectureSpec,
    image: &Array2<T>,
    target: usize,
) -> Result<(T, Gradients<T>)> {
    let trace = forward_trace(params, spec, image)?;
    let loss = cross_entropy(&trace.logits, target);
    let out = backward(params, spec, &trace, target, false);
    Ok((loss, out.grads))
}

/// Gradient of the cross-entropy toward `target_label` with respect to the
/// input pixels.
pub fn input_gradient(
    net: &NetworkParameters,
    image: &Array2<f32>,
    target: usize,
) -> Result<Array2<f32>> {
    let trace = forward_trace(&net.params, &net.spec, image)?;
    let out = backward(&net.params, &net.spec, &trace, target, true);
    Ok(out.d_input.expect("input gradient requested"))
}

/// f64 twin of [`input_gradient`] for the finite-difference checks.
pub fn input_gradient_f64(
    params: &Parameters<f64>,
    spec: &ArchitectureSpec,
    image: &Array2<f64>,
    target: usize,
) -> Result<Array2<f64>> {
    let trace = forward_trace(params, spec, image)?;
    let out = backward(params, spec, &trace, target, true);
    Ok(out.d_input.expect("input gradient requested"))
}

/// Loss of one example without gradients (used by the difference oracle).
pub fn example_loss<T: Real>(
    params: &Parameters<T>,
    spec: &ArchitectureSpec,
    image: &Array2<T>,
    target: usize,
) -> Result<T> {
    let trace = forward_trace(params, spec, image)?;
    Ok(cross_entropy(&trace.logits, target))
}

/// A borrowed evaluation case: an image and its class index.
pub struct EvalCase<'a> {
    pub image: &'a Array2<f32>,
    pub target: usize,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::he_init;
    use approx::assert_abs_diff_eq;
    use ndarray::array;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn toy_spec() -> ArchitectureSpec {
        ArchitectureSpec {
            input_resolution: 8,
            conv1_filters: 2,
            conv1_kernel: 3,
            conv2_filters: 3,
            conv2_kernel: 3,
            dense1_width: 8,
        }
    }

    fn toy_params_f64(seed: u64) -> Parameters<f64> {
        he_init(&toy_spec(), seed).params.cast::<f64>()
    }

    fn toy_image(seed: u64) -> Array2<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Array2::from_shape_fn((8, 8), |_| rng.gen_range(-1.0..1.0))
    }

    #[test]
    fn im2col_and_col2im_are_adjoint() {
        // <im2col(x), y> == <x, col2im(y)> for random x, y
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let side = 6;
        let channels = 3;
        let k = 3;
        let x = Array2::from_shape_fn((side * side, channels), |_| rng.gen_range(-1.0..1.0));
        let y = Array2::from_shape_fn((side * side, k * k * channels), |_| {
            rng.gen_range(-1.0..1.0)
        });
        let lhs: f64 = (&im2col(&x, side, k) * &y).sum();
        let rhs: f64 = (&x * &col2im(&y, side, k, channels)).sum();
        assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-10);
    }

    #[test]
    fn maxpool_selects_largest_and_first_on_ties() {
        // one channel, 4x4 spatial map
        let fm = array![
            [1.0], [5.0], [2.0], [2.0],
            [3.0], [4.0], [2.0], [2.0],
            [0.0], [0.0], [7.0], [6.0],
            [0.0], [0.0], [6.0], [7.0]
        ];
        let (pooled, argmax) = maxpool(&fm, 4);
        assert_eq!(pooled[[0, 0]], 5.0);
        assert_eq!(argmax[[0, 0]], 1);
        assert_eq!(pooled[[1, 0]], 2.0);
        // tie among equal values goes to the lowest linear index
        assert_eq!(argmax[[1, 0]], 2);
        assert_eq!(pooled[[3, 0]], 7.0);
        assert_eq!(argmax[[3, 0]], 10);
    }

    #[test]
    fn pooling_halves_each_dimension() {
        let spec = toy_spec();
        let params = toy_params_f64(3);
        let trace = forward_trace(&params, &spec, &toy_image(4)).unwrap();
        assert_eq!(trace.z1.dim(), (64, 2));
        assert_eq!(trace.z2.dim(), (16, 3));
        assert_eq!(trace.flat.len(), 3 * 4);
    }

    #[test]
    fn softmax_sums_to_one_and_loss_is_finite() {
        let spec = toy_spec();
        let params = toy_params_f64(5);
        let image = toy_image(6);
        let trace = forward_trace(&params, &spec, &image).unwrap();
        assert_abs_diff_eq!(trace.probs.sum(), 1.0, epsilon = 1e-12);
        assert!(trace.probs.iter().all(|p| p.is_finite()));
        let loss = cross_entropy(&trace.logits, 0);
        assert!(loss.is_finite() && loss > 0.0);
    }

    #[test]
    fn zero_network_predicts_even_odds() {
        let spec = toy_spec();
        let params = Parameters::<f64>::zeros_like(&spec);
        let trace = forward_trace(&params, &spec, &toy_image(7)).unwrap();
        assert_abs_diff_eq!(trace.probs[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(trace.probs[1], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn output_bias_gradient_is_softmax_minus_onehot() {
        let spec = toy_spec();
        let params = toy_params_f64(8);
        let image = toy_image(9);
        let trace = forward_trace(&params, &spec, &image).unwrap();
        let (_, grads) = example_gradients(&params, &spec, &image, 1).unwrap();
        assert_abs_diff_eq!(grads.dense2_b[0], trace.probs[0], epsilon = 1e-12);
        assert_abs_diff_eq!(grads.dense2_b[1], trace.probs[1] - 1.0, epsilon = 1e-12);
    }

    #[test]
    fn zero_image_zero_weights_gives_zero_conv_gradients() {
        let spec = toy_spec();
        let params = Parameters::<f64>::zeros_like(&spec);
        let image = Array2::<f64>::zeros((8, 8));
        let (_, grads) = example_gradients(&params, &spec, &image, 0).unwrap();
        assert!(grads.conv1_w.iter().all(|&g| g == 0.0));
        assert!(grads.conv2_w.iter().all(|&g| g == 0.0));
    }

    /// The hard gate: every parameter gradient against central differences.
    #[test]
    fn parameter_gradients_match_finite_differences() {
        let spec = toy_spec();
        let mut params = toy_params_f64(11);
        let image = toy_image(12);
        let target = 1;
        let (_, grads) = example_gradients(&params, &spec, &image, target).unwrap();

        let h = 1e-5;
        let mut checked = 0usize;
        for tensor_idx in 0..8 {
            let len = tensor_len(&params, tensor_idx);
            for i in 0..len {
                let orig = get_param(&params, tensor_idx, i);
                set_param(&mut params, tensor_idx, i, orig + h);
                let up = example_loss(&params, &spec, &image, target).unwrap();
                set_param(&mut params, tensor_idx, i, orig - h);
                let dn = example_loss(&params, &spec, &image, target).unwrap();
                set_param(&mut params, tensor_idx, i, orig);
                let fd = (up - dn) / (2.0 * h);
                let an = get_param(&grads_ref(&grads), tensor_idx, i);
                let denom = fd.abs().max(an.abs()).max(1e-6);
                assert!(
                    (fd - an).abs() / denom < 1e-4,
                    "tensor {tensor_idx} index {i}: fd={fd}, analytic={an}"
                );
                checked += 1;
            }
        }
        assert_eq!(checked, spec.parameter_count());
    }

    #[test]
    fn input_gradient_matches_finite_differences() {
        let spec = toy_spec();
        let params = toy_params_f64(13);
        let mut image = toy_image(14);
        let target = 0;
        let grad = input_gradient_f64(&params, &spec, &image, target).unwrap();

        let h = 1e-5;
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for _ in 0..20 {
            let i = rng.gen_range(0..8);
            let j = rng.gen_range(0..8);
            let orig = image[[i, j]];
            image[[i, j]] = orig + h;
            let up = example_loss(&params, &spec, &image, target).unwrap();
            image[[i, j]] = orig - h;
            let dn = example_loss(&params, &spec, &image, target).unwrap();
            image[[i, j]] = orig;
            let fd = (up - dn) / (2.0 * h);
            let an = grad[[i, j]];
            let denom = fd.abs().max(an.abs()).max(1e-6);
            assert!(
                (fd - an).abs() / denom < 1e-4,
                "pixel ({i},{j}): fd={fd}, analytic={an}"
            );
        }
    }

    #[test]
    fn dead_relu_path_has_zero_input_gradient() {
        let spec = toy_spec();
        let mut params = toy_params_f64(16);
        // all conv1 pre-activations forced negative: weights negative, big
        // negative bias, nonnegative image
        params.conv1_w.mapv_inplace(|v| -v.abs());
        params.conv1_b.fill(-10.0);
        let image = toy_image(17).mapv(f64::abs);
        let grad = input_gradient_f64(&params, &spec, &image, 0).unwrap();
        assert!(grad.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn shape_mismatch_rejected() {
        let spec = toy_spec();
        let params = toy_params_f64(18);
        let image = Array2::<f64>::zeros((9, 9));
        assert!(forward_trace(&params, &spec, &image).is_err());
    }

    // flat indexing helpers for the finite-difference sweep
    fn grads_ref<T: Real>(g: &Gradients<T>) -> &Parameters<T> {
        g
    }

    fn tensor_len(p: &Parameters<f64>, t: usize) -> usize {
        match t {
            0 => p.conv1_w.len(),
            1 => p.conv1_b.len(),
            2 => p.conv2_w.len(),
            3 => p.conv2_b.len(),
            4 => p.dense1_w.len(),
            5 => p.dense1_b.len(),
            6 => p.dense2_w.len(),
            7 => p.dense2_b.len(),
            _ => unreachable!(),
        }
    }

    fn get_param(p: &Parameters<f64>, t: usize, i: usize) -> f64 {
        match t {
            0 => p.conv1_w.as_slice().unwrap()[i],
            1 => p.conv1_b.as_slice().unwrap()[i],
            2 => p.conv2_w.as_slice().unwrap()[i],
            3 => p.conv2_b.as_slice().unwrap()[i],
            4 => p.dense1_w.as_slice().unwrap()[i],
            5 => p.dense1_b.as_slice().unwrap()[i],
            6 => p.dense2_w.as_slice().unwrap()[i],
            7 => p.dense2_b.as_slice().unwrap()[i],
            _ => unreachable!(),
        }
    }

    fn set_param(p: &mut Parameters<f64>, t: usize, i: usize, v: f64) {
        match t {
            0 => p.conv1_w.as_slice_mut().unwrap()[i] = v,
            1 => p.conv1_b.as_slice_mut().unwrap()[i] = v,
            2 => p.conv2_w.as_slice_mut().unwrap()[i] = v,
            3 => p.conv2_b.as_slice_mut().unwrap()[i] = v,
            4 => p.dense1_w.as_slice_mut().unwrap()[i] = v,
            5 => p.dense1_b.as_slice_mut().unwrap()[i] = v,
            6 => p.dense2_w.as_slice_mut().unwrap()[i] = v,
            7 => p.dense2_b.as_slice_mut().unwrap()[i] = v,
            _ => unreachable!(),
        }
    }
}
