//! Finite-alphabet probability primitives and the Markov source construction.
//!
//! Everything downstream (curves, regions, the simulator) runs on these
//! types. All logarithms are base 2, so entropies and mutual informations are
//! in bits, `0·log 0 := 0`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Absolute tolerance for pmf normalization and equality checks.
pub const PROB_TOL: f64 = 1e-12;

// ---------------------------------------------------------------------------
// Pmf
// ---------------------------------------------------------------------------

/// A probability mass function over an indexed finite alphabet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pmf(Vec<f64>);

impl Pmf {
    /// Validates and wraps a probability vector: entries nonnegative, sum
    /// within [`PROB_TOL`] of 1, alphabet nonempty.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidPmf("empty alphabet".into()));
        }
        for (i, &p) in probs.iter().enumerate() {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidPmf(format!("entry {i} is {p}")));
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > PROB_TOL {
            return Err(Error::InvalidPmf(format!("entries sum to {sum}")));
        }
        Ok(Self(probs))
    }

    pub fn uniform(n: usize) -> Self {
        Self(vec![1.0 / n as f64; n.max(1)])
    }

    /// Bernoulli(p) as the pmf (P[0]=1-p, P[1]=p).
    pub fn bernoulli(p: f64) -> Result<Self> {
        Self::new(vec![1.0 - p, p])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> f64 {
        self.0[i]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Shannon entropy in bits.
    pub fn entropy(&self) -> f64 {
        entropy_of(&self.0)
    }
}

fn entropy_of(probs: &[f64]) -> f64 {
    let mut h = 0.0;
    for &p in probs {
        if p > 0.0 {
            h -= p * p.log2();
        }
    }
    h
}

/// Shannon entropy of a pmf, in bits; `H(p) = -sum p_i log2 p_i`.
pub fn entropy(p: &Pmf) -> f64 {
    p.entropy()
}

// ---------------------------------------------------------------------------
// Channel
// ---------------------------------------------------------------------------

/// A conditional law output|input: one pmf row per input symbol, all rows
/// over one output alphabet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Channel {
    rows: Vec<Pmf>,
}

impl Channel {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidPmf("channel with no input symbols".into()));
        }
        let width = rows[0].len();
        let rows = rows
            .into_iter()
            .map(|r| {
                if r.len() != width {
                    return Err(Error::ShapeMismatch(format!(
                        "channel rows of widths {width} and {}",
                        r.len()
                    )));
                }
                Pmf::new(r)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { rows })
    }

    /// Binary symmetric channel with the given crossover probability.
    pub fn binary_symmetric(crossover: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&crossover) {
            return Err(Error::Domain(format!("crossover {crossover} outside [0,1]")));
        }
        Self::new(vec![
            vec![1.0 - crossover, crossover],
            vec![crossover, 1.0 - crossover],
        ])
    }

    /// Identity channel on an alphabet of size `n`.
    pub fn identity(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| {
                let mut r = vec![0.0; n];
                r[i] = 1.0;
                Pmf::new(r).expect("identity row is a valid pmf")
            })
            .collect();
        Self { rows }
    }

    /// Channel with a single output symbol (a constant auxiliary).
    pub fn constant(inputs: usize) -> Self {
        let rows = (0..inputs)
            .map(|_| Pmf::new(vec![1.0]).expect("valid"))
            .collect();
        Self { rows }
    }

    pub fn num_inputs(&self) -> usize {
        self.rows.len()
    }

    pub fn num_outputs(&self) -> usize {
        self.rows[0].len()
    }

    pub fn prob(&self, input: usize, output: usize) -> f64 {
        self.rows[input].get(output)
    }

    pub fn row(&self, input: usize) -> &Pmf {
        &self.rows[input]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows.iter().map(|r| r.as_slice().to_vec()).collect()
    }
}

// ---------------------------------------------------------------------------
// Joint distributions
// ---------------------------------------------------------------------------

/// A joint pmf over a product alphabet A x B, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Joint {
    data: Vec<f64>,
    rows: usize,
    cols: usize,
}

impl Joint {
    pub fn new(matrix: Vec<Vec<f64>>) -> Result<Self> {
        if matrix.is_empty() || matrix[0].is_empty() {
            return Err(Error::InvalidPmf("empty joint".into()));
        }
        let cols = matrix[0].len();
        let rows = matrix.len();
        let mut data = Vec::with_capacity(rows * cols);
        for r in &matrix {
            if r.len() != cols {
                return Err(Error::ShapeMismatch("ragged joint matrix".into()));
            }
            data.extend_from_slice(r);
        }
        // validates nonnegativity and normalization
        Pmf::new(data.clone())?;
        Ok(Self { data, rows, cols })
    }

    /// Joint from an input marginal and a conditional law: p(a,b) = p(a) w(b|a).
    pub fn from_marginal_and_channel(marginal: &Pmf, channel: &Channel) -> Result<Self> {
        if marginal.len() != channel.num_inputs() {
            return Err(Error::ShapeMismatch(format!(
                "marginal of size {} vs channel with {} inputs",
                marginal.len(),
                channel.num_inputs()
            )));
        }
        let rows = marginal.len();
        let cols = channel.num_outputs();
        let mut data = Vec::with_capacity(rows * cols);
        for a in 0..rows {
            for b in 0..cols {
                data.push(marginal.get(a) * channel.prob(a, b));
            }
        }
        Ok(Self { data, rows, cols })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, a: usize, b: usize) -> f64 {
        self.data[a * self.cols + b]
    }

    pub fn row_marginal(&self) -> Pmf {
        let mut m = vec![0.0; self.rows];
        for a in 0..self.rows {
            for b in 0..self.cols {
                m[a] += self.at(a, b);
            }
        }
        Pmf(m)
    }

    pub fn col_marginal(&self) -> Pmf {
        let mut m = vec![0.0; self.cols];
        for a in 0..self.rows {
            for b in 0..self.cols {
                m[b] += self.at(a, b);
            }
        }
        Pmf(m)
    }

    /// Conditional law of the column coordinate given the row coordinate.
    /// Rows with zero marginal become uniform (they carry no mass).
    pub fn col_given_row(&self) -> Channel {
        let marg = self.row_marginal();
        let rows = (0..self.rows)
            .map(|a| {
                let pa = marg.get(a);
                let r = if pa > 0.0 {
                    (0..self.cols).map(|b| self.at(a, b) / pa).collect()
                } else {
                    vec![1.0 / self.cols as f64; self.cols]
                };
                Pmf(r)
            })
            .collect();
        Channel { rows }
    }

    pub fn swapped(&self) -> Joint {
        let mut data = vec![0.0; self.data.len()];
        for a in 0..self.rows {
            for b in 0..self.cols {
                data[b * self.rows + a] = self.at(a, b);
            }
        }
        Joint {
            data,
            rows: self.cols,
            cols: self.rows,
        }
    }

    pub fn to_matrix(&self) -> Vec<Vec<f64>> {
        (0..self.rows)
            .map(|a| (0..self.cols).map(|b| self.at(a, b)).collect())
            .collect()
    }
}

/// Mutual information I(A;B) of a joint pmf, in bits. Computed as
/// H(A) + H(B) - H(A,B), clamped at 0 against roundoff.
pub fn mutual_information(joint: &Joint) -> f64 {
    let h_joint = entropy_of(&joint.data);
    let i = joint.row_marginal().entropy() + joint.col_marginal().entropy() - h_joint;
    i.max(0.0)
}

/// A joint pmf over a triple product alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct Joint3 {
    data: Vec<f64>,
    dims: [usize; 3],
}

impl Joint3 {
    fn idx(&self, x: usize, y: usize, z: usize) -> usize {
        (x * self.dims[1] + y) * self.dims[2] + z
    }

    pub fn at(&self, x: usize, y: usize, z: usize) -> f64 {
        self.data[self.idx(x, y, z)]
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    /// Marginal over one coordinate (0, 1, or 2).
    pub fn marginal(&self, axis: usize) -> Pmf {
        let mut m = vec![0.0; self.dims[axis]];
        for x in 0..self.dims[0] {
            for y in 0..self.dims[1] {
                for z in 0..self.dims[2] {
                    let k = [x, y, z][axis];
                    m[k] += self.at(x, y, z);
                }
            }
        }
        Pmf(m)
    }

    /// Pair marginal over two distinct coordinates, in the given order.
    pub fn pair_marginal(&self, a: usize, b: usize) -> Joint {
        let mut data = vec![0.0; self.dims[a] * self.dims[b]];
        for x in 0..self.dims[0] {
            for y in 0..self.dims[1] {
                for z in 0..self.dims[2] {
                    let c = [x, y, z];
                    data[c[a] * self.dims[b] + c[b]] += self.at(x, y, z);
                }
            }
        }
        Joint {
            data,
            rows: self.dims[a],
            cols: self.dims[b],
        }
    }
}

// ---------------------------------------------------------------------------
// Binary helpers
// ---------------------------------------------------------------------------

/// Binary entropy h_b(p) in bits.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("binary_entropy({p}) outside [0,1]")));
    }
    Ok(entropy_of(&[p, 1.0 - p]))
}

/// Inverse of the binary entropy on [0, 1/2]: the unique p <= 0.5 with
/// h_b(p) = h, found by bisection to |h_b(p) - h| <= 1e-12.
pub fn binary_entropy_inverse(h: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&h) {
        return Err(Error::Domain(format!(
            "binary_entropy_inverse({h}) outside [0,1]"
        )));
    }
    if h == 0.0 {
        return Ok(0.0);
    }
    if h == 1.0 {
        return Ok(0.5);
    }
    let (mut lo, mut hi) = (0.0_f64, 0.5_f64);
    // h_b is strictly increasing on [0, 1/2]; ~90 halvings exhaust f64.
    for _ in 0..90 {
        let mid = 0.5 * (lo + hi);
        if entropy_of(&[mid, 1.0 - mid]) < h {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < f64::EPSILON {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Binary convolution a * b = a + b - 2ab: the crossover probability of two
/// cascaded binary symmetric channels.
pub fn binary_convolution(a: f64, b: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&a) && (0.0..=1.0).contains(&b));
    a + b - 2.0 * a * b
}

// ---------------------------------------------------------------------------
// JointSource
// ---------------------------------------------------------------------------

/// The (X, Y, Z) law under both hypotheses: under the null the triple is
/// i.i.d. `P_XY · P_Z|Y`; under the alternative it is the product of the
/// three null marginals (testing against independence).
#[derive(Debug, Clone)]
pub struct JointSource {
    p_xy: Joint,
    p_z_given_y: Channel,
    h0: Joint3,
    h1: Joint3,
    p_x: Pmf,
    p_y: Pmf,
    p_z: Pmf,
    y_given_x: Channel,
    p_yz: Joint,
}

impl JointSource {
    pub fn p_xy(&self) -> &Joint {
        &self.p_xy
    }

    pub fn p_z_given_y(&self) -> &Channel {
        &self.p_z_given_y
    }

    pub fn h0_joint(&self) -> &Joint3 {
        &self.h0
    }

    pub fn h1_joint(&self) -> &Joint3 {
        &self.h1
    }

    pub fn p_x(&self) -> &Pmf {
        &self.p_x
    }

    pub fn p_y(&self) -> &Pmf {
        &self.p_y
    }

    pub fn p_z(&self) -> &Pmf {
        &self.p_z
    }

    pub fn y_given_x(&self) -> &Channel {
        &self.y_given_x
    }

    /// Joint law of (Y, Z) under the null; the second hop's input x target.
    pub fn p_yz(&self) -> &Joint {
        &self.p_yz
    }
}

/// Composes the null-hypothesis law `p_xy · p_z_given_y` and derives the
/// alternative (product of marginals) from it.
pub fn markov_compose(p_xy: &Joint, p_z_given_y: &Channel) -> Result<JointSource> {
    if p_xy.cols() != p_z_given_y.num_inputs() {
        return Err(Error::ShapeMismatch(format!(
            "p_xy has {} y-symbols, p_z_given_y has {} inputs",
            p_xy.cols(),
            p_z_given_y.num_inputs()
        )));
    }
    let (nx, ny, nz) = (p_xy.rows(), p_xy.cols(), p_z_given_y.num_outputs());
    let mut h0 = Joint3 {
        data: vec![0.0; nx * ny * nz],
        dims: [nx, ny, nz],
    };
    for x in 0..nx {
        for y in 0..ny {
            for z in 0..nz {
                let i = h0.idx(x, y, z);
                h0.data[i] = p_xy.at(x, y) * p_z_given_y.prob(y, z);
            }
        }
    }
    let p_x = h0.marginal(0);
    let p_y = h0.marginal(1);
    let p_z = h0.marginal(2);

    let mut h1 = Joint3 {
        data: vec![0.0; nx * ny * nz],
        dims: [nx, ny, nz],
    };
    for x in 0..nx {
        for y in 0..ny {
            for z in 0..nz {
                let i = h1.idx(x, y, z);
                h1.data[i] = p_x.get(x) * p_y.get(y) * p_z.get(z);
            }
        }
    }

    // marginalization consistency of the composed law
    let back_xy = h0.pair_marginal(0, 1);
    for x in 0..nx {
        for y in 0..ny {
            if (back_xy.at(x, y) - p_xy.at(x, y)).abs() > PROB_TOL {
                return Err(Error::InvalidPmf(
                    "composed law does not marginalize back to p_xy".into(),
                ));
            }
        }
    }

    let p_yz = h0.pair_marginal(1, 2);
    let y_given_x = p_xy.col_given_row();
    Ok(JointSource {
        p_xy: p_xy.clone(),
        p_z_given_y: p_z_given_y.clone(),
        h0,
        h1,
        p_x,
        p_y,
        p_z,
        y_given_x,
        p_yz,
    })
}

// ---------------------------------------------------------------------------
// Binary example source
// ---------------------------------------------------------------------------

/// Parameters of the doubly binary source: X ~ Bern(p_x), Y = X xor S with
/// S ~ Bern(p_s), Z = Y xor T with T ~ Bern(p_t).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinaryExampleParams {
    pub p_x: f64,
    pub p_s: f64,
    pub p_t: f64,
}

impl BinaryExampleParams {
    pub fn new(p_x: f64, p_s: f64, p_t: f64) -> Result<Self> {
        for (name, v) in [("p_x", p_x), ("p_s", p_s), ("p_t", p_t)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Domain(format!("{name} = {v} outside [0,1]")));
            }
        }
        Ok(Self { p_x, p_s, p_t })
    }
}

/// Builds the binary example source from its three Bernoulli parameters.
pub fn build_example_source(params: &BinaryExampleParams) -> Result<JointSource> {
    let p_x = Pmf::bernoulli(params.p_x)?;
    let y_given_x = Channel::binary_symmetric(params.p_s)?;
    let p_xy = Joint::from_marginal_and_channel(&p_x, &y_given_x)?;
    let z_given_y = Channel::binary_symmetric(params.p_t)?;
    markov_compose(&p_xy, &z_given_y)
}

/// Seeded random binary source for oracle cross-checks: a dithered random
/// joint on {0,1}^2 and a random second-hop channel.
pub fn random_binary_source<R: Rng>(rng: &mut R) -> JointSource {
    // floor keeps all symbols alive so information quantities stay smooth
    let mut m = [[0.0_f64; 2]; 2];
    let mut sum = 0.0;
    for r in &mut m {
        for v in r.iter_mut() {
            *v = rng.gen_range(0.05..1.0);
            sum += *v;
        }
    }
    let p_xy = Joint::new(m.iter().map(|r| r.iter().map(|v| v / sum).collect()).collect())
        .expect("normalized matrix is a valid joint");
    let rows = (0..2)
        .map(|_| {
            let a: f64 = rng.gen_range(0.05..0.95);
            vec![a, 1.0 - a]
        })
        .collect();
    let z_given_y = Channel::new(rows).expect("valid channel");
    markov_compose(&p_xy, &z_given_y).expect("compatible shapes")
}

// ---------------------------------------------------------------------------
// Source definition files
// ---------------------------------------------------------------------------

/// On-disk source description: either explicit row-major matrices or the
/// binary example parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SourceSpec {
    Example { example: BinaryExampleParams },
    Matrices {
        p_xy: Vec<Vec<f64>>,
        p_z_given_y: Vec<Vec<f64>>,
    },
}

impl SourceSpec {
    pub fn build(&self) -> Result<JointSource> {
        match self {
            SourceSpec::Example { example } => {
                // re-validate: deserialized params bypass the constructor
                let p = BinaryExampleParams::new(example.p_x, example.p_s, example.p_t)?;
                build_example_source(&p)
            }
            SourceSpec::Matrices { p_xy, p_z_given_y } => {
                let joint = Joint::new(p_xy.clone())?;
                let channel = Channel::new(p_z_given_y.clone())?;
                markov_compose(&joint, &channel)
            }
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: SourceSpec =
            serde_json::from_str(text).map_err(|e| Error::Malformed(format!("source file: {e}")))?;
        Ok(spec)
    }

    pub fn example(p_x: f64, p_s: f64, p_t: f64) -> Result<Self> {
        Ok(SourceSpec::Example {
            example: BinaryExampleParams::new(p_x, p_s, p_t)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE_IXY: f64 = 0.5310044064107188; // 1 - h_b(0.1)
    const EXAMPLE_IYZ: f64 = 0.2780719051126377; // 1 - h_b(0.2)

    fn example() -> JointSource {
        build_example_source(&BinaryExampleParams::new(0.5, 0.9, 0.8).unwrap()).unwrap()
    }

    #[test]
    fn entropy_basics() {
        assert_eq!(entropy(&Pmf::uniform(2)), 1.0);
        assert_eq!(entropy(&Pmf::new(vec![1.0, 0.0]).unwrap()), 0.0);
        let h = entropy(&Pmf::new(vec![0.1, 0.9]).unwrap());
        assert!((h - 0.4689955935892812).abs() < 1e-12);
        // bounded by log of the alphabet size
        let p = Pmf::new(vec![0.2, 0.5, 0.3]).unwrap();
        assert!(p.entropy() <= 3.0_f64.log2() + 1e-12);
    }

    #[test]
    fn pmf_rejects_bad_input() {
        assert!(Pmf::new(vec![]).is_err());
        assert!(Pmf::new(vec![0.5, 0.6]).is_err());
        assert!(Pmf::new(vec![-0.1, 1.1]).is_err());
        assert!(Pmf::new(vec![f64::NAN, 1.0]).is_err());
    }

    #[test]
    fn mutual_information_product_is_zero() {
        let j = Joint::new(vec![vec![0.12, 0.28], vec![0.18, 0.42]]).unwrap();
        assert!(mutual_information(&j).abs() < 1e-12);
    }

    #[test]
    fn mutual_information_example_hops() {
        let src = example();
        assert!((mutual_information(src.p_xy()) - EXAMPLE_IXY).abs() < 1e-12);
        assert!((mutual_information(src.p_yz()) - EXAMPLE_IYZ).abs() < 1e-12);
    }

    #[test]
    fn mutual_information_is_symmetric() {
        let j = Joint::new(vec![vec![0.1, 0.3], vec![0.4, 0.2]]).unwrap();
        let i = mutual_information(&j);
        assert!((i - mutual_information(&j.swapped())).abs() < 1e-12);
    }

    #[test]
    fn binary_entropy_endpoints_and_inverse() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy_inverse(0.0).unwrap(), 0.0);
        let p = binary_entropy_inverse(0.5).unwrap();
        assert!((p - 0.11002786443835955).abs() < 1e-10);
        assert!(binary_entropy(1.5).is_err());
        assert!(binary_entropy_inverse(-0.1).is_err());
    }

    #[test]
    fn entropy_inverse_round_trip_on_grid() {
        for k in 0..=100 {
            let h = k as f64 / 100.0;
            let p = binary_entropy_inverse(h).unwrap();
            assert!(p <= 0.5);
            assert!((binary_entropy(p).unwrap() - h).abs() < 1e-10, "h = {h}");
        }
    }

    #[test]
    fn convolution_identities() {
        assert_eq!(binary_convolution(0.0, 0.3), 0.3);
        assert_eq!(binary_convolution(0.5, 0.3), 0.5);
        assert!((binary_convolution(0.1, 0.2) - 0.26).abs() < 1e-15);
    }

    #[test]
    fn noiseless_chain_is_fully_informative() {
        let p_xy = Joint::new(vec![vec![0.5, 0.0], vec![0.0, 0.5]]).unwrap();
        let src = markov_compose(&p_xy, &Channel::identity(2)).unwrap();
        assert!((mutual_information(src.p_xy()) - 1.0).abs() < 1e-12);
        assert!((mutual_information(src.p_yz()) - 1.0).abs() < 1e-12);
        assert!((mutual_information(&src.h0_joint().pair_marginal(0, 2)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn markov_compose_rejects_shape_mismatch() {
        let p_xy = Joint::new(vec![vec![0.25, 0.25], vec![0.25, 0.25]]).unwrap();
        let w = Channel::new(vec![vec![1.0], vec![1.0], vec![1.0]]).unwrap();
        assert!(markov_compose(&p_xy, &w).is_err());
    }

    #[test]
    fn hypotheses_share_marginals() {
        let src = example();
        for axis in 0..3 {
            let m0 = src.h0_joint().marginal(axis);
            let m1 = src.h1_joint().marginal(axis);
            for i in 0..m0.len() {
                assert!((m0.get(i) - m1.get(i)).abs() < PROB_TOL);
            }
        }
        // p_x = 0.5 through a symmetric channel keeps Y uniform
        assert!((src.p_y().get(0) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn example_degenerate_params() {
        let src =
            build_example_source(&BinaryExampleParams::new(0.5, 0.5, 0.3).unwrap()).unwrap();
        assert!(mutual_information(src.p_xy()).abs() < 1e-12);
        let src =
            build_example_source(&BinaryExampleParams::new(0.5, 0.0, 0.0).unwrap()).unwrap();
        assert!((mutual_information(&src.h0_joint().pair_marginal(0, 2)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn example_relabeling_symmetry() {
        // crossover 0.9 carries the same information as crossover 0.1
        let src = example();
        assert!((mutual_information(src.p_xy()) - EXAMPLE_IXY).abs() < 1e-12);
    }

    #[test]
    fn source_spec_round_trip() {
        let spec = SourceSpec::example(0.5, 0.9, 0.8).unwrap();
        let text = serde_json::to_string(&spec).unwrap();
        let back = SourceSpec::from_json(&text).unwrap();
        let src = back.build().unwrap();
        assert!((mutual_information(src.p_xy()) - EXAMPLE_IXY).abs() < 1e-12);

        let text = r#"{"p_xy": [[0.25,0.25],[0.25,0.25]], "p_z_given_y": [[0.9,0.1],[0.1,0.9]]}"#;
        let spec = SourceSpec::from_json(text).unwrap();
        assert!(spec.build().is_ok());

        let bad = r#"{"p_xy": [[0.9,0.25],[0.25,0.25]], "p_z_given_y": [[1.0,0.0],[0.0,1.0]]}"#;
        assert!(SourceSpec::from_json(bad).unwrap().build().is_err());
    }

    #[test]
    fn data_processing_on_random_sources() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let src = random_binary_source(&mut rng);
            let ixy = mutual_information(src.p_xy());
            let iyz = mutual_information(src.p_yz());
            let ixz = mutual_information(&src.h0_joint().pair_marginal(0, 2));
            assert!(ixz <= ixy.min(iyz) + 1e-10);
        }
    }
}
