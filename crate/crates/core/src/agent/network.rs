//! Fully connected ReLU network with a scalar output.

use rand::Rng;

/// One affine layer. `w` is `fan_in × fan_out`, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Layer {
    pub fan_in: usize,
    pub fan_out: usize,
    pub w: Vec<f64>,
    pub b: Vec<f64>,
}

impl Layer {
    fn zeros(fan_in: usize, fan_out: usize) -> Self {
        Self { fan_in, fan_out, w: vec![0.0; fan_in * fan_out], b: vec![0.0; fan_out] }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QNetwork {
    layers: Vec<Layer>,
}

/// Gradients with the same shapes as the network's layers.
#[derive(Clone, Debug, PartialEq)]
pub struct Gradients {
    pub layers: Vec<Layer>,
}

/// `c = a · b` for row-major `a: m×k`, `b: k×n`, accumulating when `acc`.
fn gemm(m: usize, k: usize, n: usize, a: &[f64], a_t: bool, b: &[f64], b_t: bool, c: &mut [f64], acc: bool) {
    let (rsa, csa) = if a_t { (1, m as isize) } else { (k as isize, 1) };
    let (rsb, csb) = if b_t { (1, k as isize) } else { (n as isize, 1) };
    debug_assert!(a.len() >= m * k && b.len() >= k * n && c.len() >= m * n);
    // SAFETY: the slices hold at least m·k, k·n and m·n elements laid out
    // with the strides above.
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            1.0,
            a.as_ptr(),
            rsa,
            csa,
            b.as_ptr(),
            rsb,
            csb,
            if acc { 1.0 } else { 0.0 },
            c.as_mut_ptr(),
            n as isize,
            1,
        );
    }
}

impl QNetwork {
    /// `widths = [input, hidden…, 1]`, all parameters zero.
    pub fn zeros(widths: &[usize]) -> Self {
        assert!(widths.len() >= 2 && widths.iter().all(|&w| w > 0), "invalid widths {widths:?}");
        Self { layers: widths.windows(2).map(|p| Layer::zeros(p[0], p[1])).collect() }
    }

    /// `depth` hidden layers of `width` units; weights uniform in
    /// `±sqrt(6 / (fan_in + fan_out))`, biases zero.
    pub fn new<R: Rng>(input: usize, width: usize, depth: usize, rng: &mut R) -> Self {
        let mut widths = vec![input];
        widths.extend(std::iter::repeat_n(width, depth));
        widths.push(1);
        let mut net = Self::zeros(&widths);
        for l in &mut net.layers {
            let bound = (6.0 / (l.fan_in + l.fan_out) as f64).sqrt();
            for w in &mut l.w {
                *w = rng.random_range(-bound..=bound);
            }
        }
        net
    }

    pub fn from_layers(layers: Vec<Layer>) -> Self {
        assert!(!layers.is_empty());
        for p in layers.windows(2) {
            assert_eq!(p[0].fan_out, p[1].fan_in);
        }
        assert_eq!(layers.last().map(|l| l.fan_out), Some(1));
        Self { layers }
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn widths(&self) -> Vec<usize> {
        let mut w = vec![self.layers[0].fan_in];
        w.extend(self.layers.iter().map(|l| l.fan_out));
        w
    }

    pub fn input_width(&self) -> usize {
        self.layers[0].fan_in
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(|l| (l.fan_in + 1) * l.fan_out).sum()
    }

    /// All parameters, layer by layer, weights before biases.
    pub fn parameters(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.param_count());
        for l in &self.layers {
            out.extend_from_slice(&l.w);
            out.extend_from_slice(&l.b);
        }
        out
    }

    pub fn set_parameters(&mut self, params: &[f64]) {
        assert_eq!(params.len(), self.param_count());
        let mut at = 0;
        for l in &mut self.layers {
            let nw = l.w.len();
            l.w.copy_from_slice(&params[at..at + nw]);
            at += nw;
            let nb = l.b.len();
            l.b.copy_from_slice(&params[at..at + nb]);
            at += nb;
        }
    }

    pub fn same_architecture(&self, other: &QNetwork) -> bool {
        self.widths() == other.widths()
    }

    /// Copies `other`'s parameters into `self`.
    pub fn copy_from(&mut self, other: &QNetwork) {
        assert!(self.same_architecture(other), "architecture mismatch");
        self.layers.clone_from(&other.layers);
    }

    fn forward_cached(&self, x: &[f64], rows: usize) -> Vec<Vec<f64>> {
        let mut acts = Vec::with_capacity(self.layers.len() + 1);
        acts.push(x.to_vec());
        for (k, l) in self.layers.iter().enumerate() {
            let mut z = Vec::with_capacity(rows * l.fan_out);
            for _ in 0..rows {
                z.extend_from_slice(&l.b);
            }
            gemm(rows, l.fan_in, l.fan_out, &acts[k], false, &l.w, false, &mut z, true);
            if k + 1 < self.layers.len() {
                z.iter_mut().for_each(|v| *v = v.max(0.0));
            }
            acts.push(z);
        }
        acts
    }

    /// Outputs for `rows` inputs stored row-major in `x`.
    pub fn forward_batch(&self, x: &[f64], rows: usize) -> Vec<f64> {
        assert_eq!(x.len(), rows * self.input_width(), "input width mismatch");
        if rows == 0 {
            return Vec::new();
        }
        self.forward_cached(x, rows).pop().expect("output layer")
    }

    pub fn forward(&self, x: &[f64]) -> f64 {
        self.forward_batch(x, 1)[0]
    }

    /// Mean squared error `(1/B) Σ (y_i − q_i)²` and its gradient.
    pub fn loss_and_gradients(&self, x: &[f64], y: &[f64]) -> (f64, Gradients) {
        let rows = y.len();
        assert!(rows > 0);
        assert_eq!(x.len(), rows * self.input_width(), "input width mismatch");
        let acts = self.forward_cached(x, rows);
        let q = acts.last().expect("output");
        let scale = 1.0 / rows as f64;
        let loss = q.iter().zip(y).map(|(q, y)| (y - q) * (y - q)).sum::<f64>() * scale;
        let mut delta: Vec<f64> = q.iter().zip(y).map(|(q, y)| -2.0 * (y - q) * scale).collect();

        let mut grads: Vec<Layer> = self.layers.iter().map(|l| Layer::zeros(l.fan_in, l.fan_out)).collect();
        for k in (0..self.layers.len()).rev() {
            let l = &self.layers[k];
            let g = &mut grads[k];
            gemm(l.fan_in, rows, l.fan_out, &acts[k], true, &delta, false, &mut g.w, false);
            for r in 0..rows {
                for (gb, d) in g.b.iter_mut().zip(&delta[r * l.fan_out..(r + 1) * l.fan_out]) {
                    *gb += d;
                }
            }
            if k > 0 {
                let mut prev = vec![0.0; rows * l.fan_in];
                gemm(rows, l.fan_out, l.fan_in, &delta, false, &l.w, true, &mut prev, false);
                for (p, a) in prev.iter_mut().zip(&acts[k]) {
                    if *a <= 0.0 {
                        *p = 0.0;
                    }
                }
                delta = prev;
            }
        }
        (loss, Gradients { layers: grads })
    }
}

impl Gradients {
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for l in &self.layers {
            out.extend_from_slice(&l.w);
            out.extend_from_slice(&l.b);
        }
        out
    }
}
