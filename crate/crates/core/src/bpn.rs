//! One-hidden-layer sigmoid back-propagation network with online gradient
//! descent, residual-error metrics and a plain-text weight snapshot format.

use std::collections::hash_map::DefaultHasher;
use std::fmt::Write as _;
use std::hash::{Hash, Hasher};

use rand::Rng as _;

use crate::corpus::{class_code, BitPattern, ClassCode, Corpus};
use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NetworkShape {
    pub n_input: usize,
    pub n_hidden: usize,
    pub n_output: usize,
}

impl NetworkShape {
    /// Shape with the customary hidden size `round(sqrt(n_input * n_output))`.
    pub fn with_geometric_hidden(n_input: usize, n_output: usize) -> Self {
        let n_hidden = ((n_input * n_output) as f64).sqrt().round() as usize;
        NetworkShape {
            n_input,
            n_hidden: n_hidden.max(1),
            n_output,
        }
    }

    pub fn new(n_input: usize, n_hidden: usize, n_output: usize) -> Result<Self> {
        if n_input == 0 || n_hidden == 0 || n_output == 0 {
            return Err(Error::InvalidShape(format!(
                "network {n_input}-{n_hidden}-{n_output} has an empty layer"
            )));
        }
        Ok(NetworkShape {
            n_input,
            n_hidden,
            n_output,
        })
    }

    /// Always one; deeper networks are not supported.
    pub fn n_hidden_layers(&self) -> usize {
        1
    }

    pub fn n_params(&self) -> usize {
        self.n_hidden * (self.n_input + 1) + self.n_output * (self.n_hidden + 1)
    }
}

impl Default for NetworkShape {
    /// 256-32-4: a 16×16 glyph in, a 4-bit class code out.
    fn default() -> Self {
        Self::with_geometric_hidden(256, 4)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub tolerance: f64,
    pub learning_rate: f64,
    pub max_epochs: usize,
    pub init_seed: u64,
    pub init_range: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            tolerance: 0.05,
            learning_rate: 0.5,
            max_epochs: 2000,
            init_seed: 0,
            init_range: 0.5,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0 && self.tolerance < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "tolerance {} not in (0, 1)",
                self.tolerance
            )));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "learning rate {} must be positive",
                self.learning_rate
            )));
        }
        if !(self.init_range > 0.0 && self.init_range.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "init range {} must be positive",
                self.init_range
            )));
        }
        Ok(())
    }
}

/// Weights are stored row-major: `w_ih[j * n_input + i]` connects input
/// `i` to hidden unit `j`, `w_ho[k * n_hidden + j]` hidden `j` to output `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    pub shape: NetworkShape,
    pub w_ih: Vec<f64>,
    pub b_h: Vec<f64>,
    pub w_ho: Vec<f64>,
    pub b_o: Vec<f64>,
}

#[inline]
pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Every parameter uniform on `[-range, range]`, drawn in snapshot order.
pub fn init_network(shape: NetworkShape, seed: u64, range: f64) -> Result<Network> {
    if !(range > 0.0 && range.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "init range {range} must be positive"
        )));
    }
    let mut rng = rng::stream(seed, 0);
    let mut draw = |n: usize| -> Vec<f64> { (0..n).map(|_| rng.gen_range(-range..=range)).collect() };
    let w_ih = draw(shape.n_hidden * shape.n_input);
    let b_h = draw(shape.n_hidden);
    let w_ho = draw(shape.n_output * shape.n_hidden);
    let b_o = draw(shape.n_output);
    Ok(Network {
        shape,
        w_ih,
        b_h,
        w_ho,
        b_o,
    })
}

/// Activations of one forward pass.
#[derive(Debug, Clone)]
pub struct Activations {
    pub hidden: Vec<f64>,
    pub output: Vec<f64>,
}

/// Gradient of `E = ½ Σ (out - target)²` with the same layout as [`Network`].
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient {
    pub w_ih: Vec<f64>,
    pub b_h: Vec<f64>,
    pub w_ho: Vec<f64>,
    pub b_o: Vec<f64>,
}

impl Network {
    pub fn zeros(shape: NetworkShape) -> Self {
        Network {
            shape,
            w_ih: vec![0.0; shape.n_hidden * shape.n_input],
            b_h: vec![0.0; shape.n_hidden],
            w_ho: vec![0.0; shape.n_output * shape.n_hidden],
            b_o: vec![0.0; shape.n_output],
        }
    }

    fn check_len(expected: usize, actual: usize) -> Result<()> {
        if expected != actual {
            return Err(Error::DimensionMismatch { expected, actual });
        }
        Ok(())
    }

    pub fn activations(&self, input: &[f64]) -> Result<Activations> {
        let NetworkShape {
            n_input,
            n_hidden,
            n_output,
        } = self.shape;
        Self::check_len(n_input, input.len())?;
        let hidden: Vec<f64> = (0..n_hidden)
            .map(|j| {
                let row = &self.w_ih[j * n_input..(j + 1) * n_input];
                let net: f64 = row.iter().zip(input).map(|(w, x)| w * x).sum();
                sigmoid(self.b_h[j] + net)
            })
            .collect();
        let output = (0..n_output)
            .map(|k| {
                let row = &self.w_ho[k * n_hidden..(k + 1) * n_hidden];
                let net: f64 = row.iter().zip(&hidden).map(|(w, h)| w * h).sum();
                sigmoid(self.b_o[k] + net)
            })
            .collect();
        Ok(Activations { hidden, output })
    }

    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>> {
        Ok(self.activations(input)?.output)
    }

    /// Analytic gradient of the squared error on one pattern.
    pub fn gradient(&self, input: &[f64], target: &[f64]) -> Result<Gradient> {
        let NetworkShape {
            n_input,
            n_hidden,
            n_output,
        } = self.shape;
        Self::check_len(n_output, target.len())?;
        let act = self.activations(input)?;

        let delta_o: Vec<f64> = act
            .output
            .iter()
            .zip(target)
            .map(|(&o, &t)| (o - t) * o * (1.0 - o))
            .collect();
        let delta_h: Vec<f64> = (0..n_hidden)
            .map(|j| {
                let back: f64 = (0..n_output).map(|k| delta_o[k] * self.w_ho[k * n_hidden + j]).sum();
                let h = act.hidden[j];
                back * h * (1.0 - h)
            })
            .collect();

        let mut w_ho = vec![0.0; n_output * n_hidden];
        for k in 0..n_output {
            for j in 0..n_hidden {
                w_ho[k * n_hidden + j] = delta_o[k] * act.hidden[j];
            }
        }
        let mut w_ih = vec![0.0; n_hidden * n_input];
        for j in 0..n_hidden {
            for i in 0..n_input {
                w_ih[j * n_input + i] = delta_h[j] * input[i];
            }
        }
        Ok(Gradient {
            w_ih,
            b_h: delta_h,
            w_ho,
            b_o: delta_o,
        })
    }

    /// One online gradient-descent update on a single pattern, in place.
    pub fn backprop_step(&mut self, input: &[f64], target: &[f64], lr: f64) -> Result<()> {
        let NetworkShape {
            n_input,
            n_hidden,
            n_output,
        } = self.shape;
        Self::check_len(n_output, target.len())?;
        let act = self.activations(input)?;

        let delta_o: Vec<f64> = act
            .output
            .iter()
            .zip(target)
            .map(|(&o, &t)| (o - t) * o * (1.0 - o))
            .collect();
        // Hidden deltas use the pre-update output weights.
        let delta_h: Vec<f64> = (0..n_hidden)
            .map(|j| {
                let back: f64 = (0..n_output).map(|k| delta_o[k] * self.w_ho[k * n_hidden + j]).sum();
                let h = act.hidden[j];
                back * h * (1.0 - h)
            })
            .collect();

        for k in 0..n_output {
            let step = lr * delta_o[k];
            for (w, h) in self.w_ho[k * n_hidden..(k + 1) * n_hidden].iter_mut().zip(&act.hidden) {
                *w -= step * h;
            }
            self.b_o[k] -= step;
        }
        for j in 0..n_hidden {
            let step = lr * delta_h[j];
            if step == 0.0 {
                continue;
            }
            let row = &mut self.w_ih[j * n_input..(j + 1) * n_input];
            for (w, &x) in row.iter_mut().zip(input) {
                if x != 0.0 {
                    *w -= step * x;
                }
            }
            self.b_h[j] -= step;
        }
        Ok(())
    }

    /// Parameters in snapshot order: w_ih, b_h, w_ho, b_o.
    pub fn params(&self) -> Vec<f64> {
        [&self.w_ih[..], &self.b_h, &self.w_ho, &self.b_o].concat()
    }

    pub fn set_params(&mut self, params: &[f64]) -> Result<()> {
        Self::check_len(self.shape.n_params(), params.len())?;
        let mut rest = params;
        for dst in [&mut self.w_ih, &mut self.b_h, &mut self.w_ho, &mut self.b_o] {
            let (head, tail) = rest.split_at(dst.len());
            dst.copy_from_slice(head);
            rest = tail;
        }
        Ok(())
    }

    /// Stable hash of the exact parameter bits.
    pub fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.shape.hash(&mut h);
        for p in self.params() {
            p.to_bits().hash(&mut h);
        }
        h.finish()
    }

    /// `shape <in> <hidden> <out>` followed by one parameter per line.
    /// Floats are printed in shortest round-trip form.
    pub fn to_snapshot(&self) -> String {
        let s = self.shape;
        let mut out = format!("shape {} {} {}\n", s.n_input, s.n_hidden, s.n_output);
        for p in self.params() {
            let _ = writeln!(out, "{p:?}");
        }
        out
    }

    pub fn from_snapshot(text: &str) -> Result<Network> {
        let bad = |m: &str| Error::MalformedSnapshot(m.to_string());
        let mut tokens = text.split_whitespace();
        if tokens.next() != Some("shape") {
            return Err(bad("missing `shape` header"));
        }
        let mut dim = || -> Result<usize> {
            tokens
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| bad("invalid shape dimension"))
        };
        let shape = NetworkShape::new(dim()?, dim()?, dim()?)?;
        let params: Vec<f64> = tokens
            .map(|t| t.parse::<f64>().map_err(|_| bad(&format!("invalid weight {t:?}"))))
            .collect::<Result<_>>()?;
        if params.iter().any(|p| !p.is_finite()) {
            return Err(bad("non-finite weight"));
        }
        let mut net = Network::zeros(shape);
        net.set_params(&params)
            .map_err(|_| bad(&format!("expected {} weights, found {}", shape.n_params(), params.len())))?;
        Ok(net)
    }
}

/// Root-mean-square deviation between an output vector and a target code.
pub fn pattern_error(output: &[f64], target: &[f64]) -> Result<f64> {
    if output.len() != target.len() || output.is_empty() {
        return Err(Error::DimensionMismatch {
            expected: target.len(),
            actual: output.len(),
        });
    }
    let sq: f64 = output.iter().zip(target).map(|(o, t)| (o - t).powi(2)).sum();
    Ok((sq / output.len() as f64).sqrt())
}

/// A training example: network input and target code.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub input: Vec<f64>,
    pub target: Vec<f64>,
}

impl Sample {
    pub fn new(pattern: &BitPattern, code: &ClassCode) -> Self {
        Sample {
            input: pattern.to_input(),
            target: code.code.clone(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub network: Network,
    pub epochs: usize,
    pub converged: bool,
    /// Worst per-pattern error after the last completed epoch.
    pub final_max_error: f64,
    /// Lowest worst-pattern error seen at any epoch boundary.
    pub best_max_error: f64,
}

fn max_error(net: &Network, samples: &[Sample]) -> Result<f64> {
    samples.iter().try_fold(0.0f64, |acc, s| {
        let out = net.forward(&s.input)?;
        Ok(acc.max(pattern_error(&out, &s.target)?))
    })
}

/// Online back-propagation in fixed sample order until every sample's
/// error is below `cfg.tolerance` at an epoch boundary, or `max_epochs`
/// epochs have run. The initial network is checked before any update.
pub fn train_until_recognized(net: Network, samples: &[Sample], cfg: &TrainConfig) -> Result<TrainOutcome> {
    if samples.is_empty() {
        return Err(Error::InvalidConfig("no training samples".into()));
    }
    let mut network = net;
    let mut err = max_error(&network, samples)?;
    let mut best = err;
    let mut epochs = 0;
    while err >= cfg.tolerance && epochs < cfg.max_epochs {
        for s in samples {
            network.backprop_step(&s.input, &s.target, cfg.learning_rate)?;
        }
        epochs += 1;
        err = max_error(&network, samples)?;
        best = best.min(err);
    }
    Ok(TrainOutcome {
        network,
        epochs,
        converged: err < cfg.tolerance,
        final_max_error: err,
        best_max_error: best,
    })
}

/// Worst per-pattern error of the network over the whole corpus.
pub fn residual_fitness(net: &Network, corpus: &Corpus) -> Result<f64> {
    let n_out = net.shape.n_output;
    let codes: Vec<ClassCode> = (0..corpus.n_classes())
        .map(|c| class_code(c, n_out))
        .collect::<Result<_>>()?;
    corpus.iter().try_fold(0.0f64, |acc, (class, _, p)| {
        let out = net.forward(&p.to_input())?;
        Ok(acc.max(pattern_error(&out, &codes[class].code)?))
    })
}

/// Class whose code is nearest (Euclidean) to the network output; ties go
/// to the lower class index.
pub fn recall_class(net: &Network, input: &[f64], n_classes: usize) -> Result<usize> {
    let out = net.forward(input)?;
    nearest_class(&out, n_classes)
}

pub fn nearest_class(output: &[f64], n_classes: usize) -> Result<usize> {
    let n_out = output.len();
    let mut best = (f64::INFINITY, 0);
    for class in 0..n_classes {
        let code = class_code(class, n_out)?;
        let d: f64 = output.iter().zip(&code.code).map(|(o, t)| (o - t).powi(2)).sum();
        if d < best.0 {
            best = (d, class);
        }
    }
    Ok(best.1)
}

/// Fraction of corpus patterns whose recalled class is correct.
pub fn recall_accuracy(net: &Network, corpus: &Corpus) -> Result<f64> {
    let mut hits = 0usize;
    for (class, _, p) in corpus.iter() {
        if recall_class(net, &p.to_input(), corpus.n_classes())? == class {
            hits += 1;
        }
    }
    Ok(hits as f64 / corpus.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn tiny(shape: NetworkShape, params: &[f64]) -> Network {
        let mut n = Network::zeros(shape);
        n.set_params(params).unwrap();
        n
    }

    #[test]
    fn default_shape_is_256_32_4() {
        let s = NetworkShape::default();
        assert_eq!((s.n_input, s.n_hidden, s.n_output), (256, 32, 4));
        assert_eq!(s.n_hidden_layers(), 1);
    }

    #[test]
    fn sigmoid_values() {
        assert_eq!(sigmoid(0.0), 0.5);
        for x in [0.3, 1.7, 9.0] {
            assert_abs_diff_eq!(sigmoid(x) + sigmoid(-x), 1.0, epsilon = 1e-15);
        }
        // 1 / (1 + e^-2), e^-2 = 0.1353352832366127
        assert_abs_diff_eq!(sigmoid(2.0), 0.8807970779778823, epsilon = 1e-15);
    }

    #[test]
    fn init_is_deterministic_and_bounded() {
        let shape = NetworkShape::new(2, 2, 1).unwrap();
        let a = init_network(shape, 7, 0.5).unwrap();
        assert_eq!(a, init_network(shape, 7, 0.5).unwrap());
        let p = a.params();
        assert_eq!(p.len(), 9);
        assert!(p.iter().all(|w| (-0.5..=0.5).contains(w)));
        assert_ne!(a, init_network(shape, 8, 0.5).unwrap());
        assert!(init_network(shape, 7, 0.0).is_err());
        let small = init_network(shape, 7, 1e-12).unwrap();
        assert!(small.params().iter().all(|w| w.abs() <= 1e-12));
    }

    #[test]
    fn forward_examples() {
        let zero = Network::zeros(NetworkShape::new(3, 2, 4).unwrap());
        assert_eq!(zero.forward(&[1.0, 0.0, 1.0]).unwrap(), vec![0.5; 4]);

        let one = tiny(NetworkShape::new(1, 1, 1).unwrap(), &[1.0, 0.0, 1.0, 0.0]);
        let act = one.activations(&[0.0]).unwrap();
        assert_eq!(act.hidden, vec![0.5]);
        // sigmoid(0.5) = 1 / (1 + e^-0.5), e^-0.5 = 0.6065306597126334
        assert_abs_diff_eq!(act.output[0], 0.6224593312018546, epsilon = 1e-15);

        assert!(matches!(
            one.forward(&[0.0, 1.0]),
            Err(Error::DimensionMismatch { expected: 1, actual: 2 })
        ));
    }

    #[test]
    fn zero_input_ignores_first_layer_weights() {
        let shape = NetworkShape::new(3, 2, 2).unwrap();
        let mut a = init_network(shape, 1, 0.5).unwrap();
        let mut b = init_network(shape, 2, 0.5).unwrap();
        a.b_h.fill(0.0);
        b.b_h.fill(0.0);
        b.w_ho = a.w_ho.clone();
        b.b_o = a.b_o.clone();
        assert_eq!(a.forward(&[0.0; 3]).unwrap(), b.forward(&[0.0; 3]).unwrap());
    }

    #[test]
    fn pattern_error_examples() {
        assert_eq!(pattern_error(&[0.0, 1.0, 1.0, 0.0], &[0.0, 1.0, 1.0, 0.0]).unwrap(), 0.0);
        assert_eq!(pattern_error(&[0.5; 4], &[1.0; 4]).unwrap(), 0.5);
        assert_eq!(pattern_error(&[1.0, 0.0, 0.0, 0.0], &[0.0; 4]).unwrap(), 0.5);
        assert!(pattern_error(&[0.5; 3], &[1.0; 4]).is_err());
    }

    #[test]
    fn backprop_noop_cases() {
        let shape = NetworkShape::new(3, 2, 2).unwrap();
        let net = init_network(shape, 3, 0.5).unwrap();
        let mut same = net.clone();
        same.backprop_step(&[1.0, 0.0, 1.0], &[1.0, 0.0], 0.0).unwrap();
        assert_eq!(same, net);

        // Output weights and biases all zero give outputs of exactly 0.5;
        // with that as the target the gradient vanishes.
        let mut flat = net.clone();
        flat.w_ho.fill(0.0);
        flat.b_o.fill(0.0);
        let before = flat.clone();
        flat.backprop_step(&[1.0, 1.0, 0.0], &[0.5, 0.5], 0.7).unwrap();
        assert_eq!(flat, before);

        assert!(same.backprop_step(&[1.0], &[1.0, 0.0], 0.1).is_err());
        assert!(same.backprop_step(&[1.0, 0.0, 1.0], &[1.0], 0.1).is_err());
    }

    #[test]
    fn backprop_step_matches_gradient() {
        let shape = NetworkShape::new(4, 3, 2).unwrap();
        let net = init_network(shape, 11, 0.8).unwrap();
        let (x, t) = ([1.0, 0.0, 1.0, 1.0], [0.0, 1.0]);
        let g = net.gradient(&x, &t).unwrap();
        let mut stepped = net.clone();
        stepped.backprop_step(&x, &t, 0.25).unwrap();
        let gp = [&g.w_ih[..], &g.b_h, &g.w_ho, &g.b_o].concat();
        for ((after, before), d) in stepped.params().iter().zip(net.params()).zip(gp) {
            assert_abs_diff_eq!(*after, before - 0.25 * d, epsilon = 1e-15);
        }
    }

    #[test]
    fn training_single_pattern_converges() {
        let shape = NetworkShape::new(6, 4, 4).unwrap();
        let net = init_network(shape, 5, 0.5).unwrap();
        let sample = Sample {
            input: vec![1.0, 0.0, 1.0, 1.0, 0.0, 0.0],
            target: class_code(11, 4).unwrap().code,
        };
        let cfg = TrainConfig {
            max_epochs: 10_000,
            ..TrainConfig::default()
        };
        let out = train_until_recognized(net.clone(), std::slice::from_ref(&sample), &cfg).unwrap();
        assert!(out.converged);
        assert!(out.epochs > 0);
        let err = pattern_error(&out.network.forward(&sample.input).unwrap(), &sample.target).unwrap();
        assert!(err < 0.05);
        assert_eq!(err, out.final_max_error);

        let again = train_until_recognized(net.clone(), std::slice::from_ref(&sample), &cfg).unwrap();
        assert_eq!(again.network, out.network);
        assert_eq!(again.epochs, out.epochs);

        let capped = TrainConfig { max_epochs: 0, ..cfg };
        let none = train_until_recognized(net.clone(), &[sample], &capped).unwrap();
        assert!(!none.converged);
        assert_eq!(none.epochs, 0);
        assert_eq!(none.network, net);
    }

    #[test]
    fn residual_and_recall_on_zero_network() {
        let corpus = crate::corpus::generate_synthetic(3, 12, 2).unwrap();
        let zero = Network::zeros(NetworkShape::default());
        assert_eq!(residual_fitness(&zero, &corpus).unwrap(), 0.5);
        for (_, _, p) in corpus.iter() {
            assert_eq!(recall_class(&zero, &p.to_input(), 12).unwrap(), 0);
        }
    }

    #[test]
    fn nearest_class_ties_and_exact() {
        assert_eq!(nearest_class(&class_code(7, 4).unwrap().code, 12).unwrap(), 7);
        // Codes 2 = 0010 and 3 = 0011 differ only in the last bit.
        assert_eq!(nearest_class(&[0.0, 0.0, 1.0, 0.5], 12).unwrap(), 2);
    }

    #[test]
    fn snapshot_round_trip() {
        let net = init_network(NetworkShape::new(5, 3, 2).unwrap(), 9, 0.5).unwrap();
        let text = net.to_snapshot();
        assert!(text.starts_with("shape 5 3 2\n"));
        let back = Network::from_snapshot(&text).unwrap();
        assert_eq!(back, net);
        assert_eq!(back.fingerprint(), net.fingerprint());
        assert!(Network::from_snapshot("shape 5 3 2\n1.0").is_err());
        assert!(Network::from_snapshot("weights 1 1 1").is_err());
    }
}
