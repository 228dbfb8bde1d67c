//! The integral modular, the Luxemburg norm by bisection, and the
//! mollification-convergence experiment.
//!
//! Functions are sampled on a midpoint-rule grid over a box: the
//! quadrature is low order but robust, which matters because phi may be
//! merely continuous in x.

use std::io::{BufRead, Write};

use thiserror::Error;

use crate::conditions::{check_a1, ConditionReport};
use crate::domain::{Point, SpatialDomain};
use crate::extended::ExtendedValue;
use crate::family::{FamilyError, PhiFamily};
use crate::plan::SamplePlan;

#[derive(Debug, Error)]
pub enum ModularError {
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error("the modular stays above 1 for every lambda up to {0}")]
    NormUnbounded(f64),
    #[error("support margin {margin} is smaller than the mollifier radius {epsilon}")]
    MarginViolation { margin: f64, epsilon: f64 },
    #[error("sampled functions live on different grids")]
    GridMismatch,
    #[error("dimension {0} is not supported here")]
    UnsupportedDimension(usize),
    #[error("the local condition (A1) fails on the envelope of the support")]
    A1Violated(Box<ConditionReport>),
    #[error("csv parse error at line {line}: {message}")]
    Csv { line: usize, message: String },
}

/// Luxemburg bisection bracket, matching the extended-value range.
const LAMBDA_LO: f64 = 1e-12;
const LAMBDA_HI: f64 = 1e12;

/// One uniform axis of the sampling grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Axis {
    fn spacing(&self) -> f64 {
        (self.hi - self.lo) / self.n as f64
    }

    fn node(&self, i: usize) -> f64 {
        self.lo + (i as f64 + 0.5) * self.spacing()
    }
}

/// A function sampled at the midpoints of a uniform grid over a box, with
/// the midpoint-rule weights.
#[derive(Clone, Debug)]
pub struct SampledFunction {
    axes: Vec<Axis>,
    values: Vec<f64>,
}

impl SampledFunction {
    /// Samples `f` at the midpoint nodes of `[lo, hi]` with `n` cells per
    /// axis.
    pub fn from_fn(
        lo: &[f64],
        hi: &[f64],
        n: usize,
        f: impl Fn(&Point) -> f64,
    ) -> SampledFunction {
        assert!(!lo.is_empty() && lo.len() == hi.len() && n > 0);
        let axes: Vec<Axis> =
            lo.iter().zip(hi.iter()).map(|(&lo, &hi)| Axis { lo, hi, n }).collect();
        let mut values = Vec::with_capacity(n.pow(axes.len() as u32));
        let mut index = vec![0usize; axes.len()];
        loop {
            let p = Point::new(index.iter().zip(&axes).map(|(&i, a)| a.node(i)).collect());
            values.push(f(&p));
            let mut axis = 0;
            loop {
                index[axis] += 1;
                if index[axis] < n {
                    break;
                }
                index[axis] = 0;
                axis += 1;
                if axis == axes.len() {
                    break;
                }
            }
            if axis == axes.len() {
                break;
            }
        }
        SampledFunction { axes, values }
    }

    pub fn zero_like(other: &SampledFunction) -> SampledFunction {
        SampledFunction { axes: other.axes.clone(), values: vec![0.0; other.values.len()] }
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The midpoint-rule weight of every node (all cells are congruent).
    pub fn weight(&self) -> f64 {
        self.axes.iter().map(Axis::spacing).product()
    }

    pub fn node(&self, flat: usize) -> Point {
        let mut rem = flat;
        let mut coords = Vec::with_capacity(self.axes.len());
        for a in &self.axes {
            coords.push(a.node(rem % a.n));
            rem /= a.n;
        }
        Point::new(coords)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> SampledFunction {
        SampledFunction { axes: self.axes.clone(), values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn sub(&self, other: &SampledFunction) -> Result<SampledFunction, ModularError> {
        if self.axes != other.axes {
            return Err(ModularError::GridMismatch);
        }
        Ok(SampledFunction {
            axes: self.axes.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
        })
    }

    /// Writes `node coordinates, value` rows with a header.
    pub fn to_csv(&self, mut w: impl Write) -> std::io::Result<()> {
        let dim = self.axes.len();
        for i in 1..=dim {
            write!(w, "x{i},")?;
        }
        writeln!(w, "value")?;
        for (flat, v) in self.values.iter().enumerate() {
            let p = self.node(flat);
            for c in p.coords() {
                write!(w, "{c},")?;
            }
            writeln!(w, "{v}")?;
        }
        Ok(())
    }

    /// Reads rows written by [`SampledFunction::to_csv`]; the grid is
    /// reconstructed from the node coordinates, which must form the
    /// midpoint lattice of a box.
    pub fn from_csv(r: impl BufRead) -> Result<SampledFunction, ModularError> {
        let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
        let mut dim = 0usize;
        for (lineno, line) in r.lines().enumerate() {
            let line = line.map_err(|e| ModularError::Csv { line: lineno + 1, message: e.to_string() })?;
            let line = line.trim();
            if line.is_empty() || lineno == 0 {
                continue; // header
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() < 2 {
                return Err(ModularError::Csv { line: lineno + 1, message: "expected coords,value".into() });
            }
            let nums: Result<Vec<f64>, _> = fields.iter().map(|s| s.trim().parse::<f64>()).collect();
            let nums = nums.map_err(|e| ModularError::Csv { line: lineno + 1, message: e.to_string() })?;
            dim = nums.len() - 1;
            rows.push((nums[..dim].to_vec(), nums[dim]));
        }
        if rows.is_empty() {
            return Err(ModularError::Csv { line: 0, message: "no data rows".into() });
        }
        // reconstruct each axis from the distinct sorted coordinates
        let mut axes = Vec::with_capacity(dim);
        for a in 0..dim {
            let mut coords: Vec<f64> = rows.iter().map(|(c, _)| c[a]).collect();
            coords.sort_by(|x, y| x.partial_cmp(y).unwrap());
            coords.dedup();
            let n = coords.len();
            let spacing = if n > 1 { coords[1] - coords[0] } else { 1.0 };
            axes.push(Axis { lo: coords[0] - spacing / 2.0, hi: coords[n - 1] + spacing / 2.0, n });
        }
        let mut f = SampledFunction {
            axes: axes.clone(),
            values: vec![0.0; axes.iter().map(|a| a.n).product()],
        };
        for (coords, v) in rows {
            let mut flat = 0usize;
            let mut stride = 1usize;
            for (a, axis) in axes.iter().enumerate() {
                let i = ((coords[a] - axis.lo) / axis.spacing() - 0.5).round() as usize;
                flat += i.min(axis.n - 1) * stride;
                stride *= axis.n;
            }
            f.values[flat] = v;
        }
        Ok(f)
    }
}

/// `sum_i w_i phi(node_i, |f_i|)`; infinite as soon as one term is.
pub fn modular(family: &PhiFamily, f: &SampledFunction) -> Result<ExtendedValue, ModularError> {
    let w = f.weight();
    let mut acc = 0.0f64;
    for (flat, &v) in f.values.iter().enumerate() {
        let node = f.node(flat);
        let term = family.evaluate(&node, v.abs())?;
        match term.to_finite() {
            Some(t) => acc += w * t,
            None => return Ok(ExtendedValue::INFINITY),
        }
    }
    Ok(ExtendedValue::new(acc))
}

/// The Luxemburg norm `inf{lambda > 0 : modular(f / lambda) <= 1}` by
/// bisection; the map `lambda -> modular(f/lambda)` is decreasing.
pub fn luxemburg_norm(family: &PhiFamily, f: &SampledFunction) -> Result<f64, ModularError> {
    if f.values.iter().all(|&v| v == 0.0) {
        return Ok(0.0);
    }
    let small_enough = |lambda: f64| -> Result<bool, ModularError> {
        let scaled = f.map(|v| v / lambda);
        Ok(modular(family, &scaled)? <= ExtendedValue::finite(1.0))
    };

    let (mut lo, mut hi);
    if small_enough(1.0)? {
        hi = 1.0;
        lo = 0.5;
        while small_enough(lo)? {
            hi = lo;
            lo /= 2.0;
            if lo < LAMBDA_LO {
                return Ok(lo);
            }
        }
    } else {
        lo = 1.0;
        hi = 2.0;
        while !small_enough(hi)? {
            lo = hi;
            hi *= 2.0;
            if hi > LAMBDA_HI {
                return Err(ModularError::NormUnbounded(LAMBDA_HI));
            }
        }
    }
    for _ in 0..200 {
        if hi - lo <= 1e-12 + 1e-10 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if small_enough(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// A standard compactly supported smooth bump, scaled to radius epsilon.
/// Discrete kernel weights are renormalized to sum to exactly 1 at every
/// output node, so constants mollify to themselves.
#[derive(Clone, Copy, Debug)]
pub struct Mollifier {
    pub epsilon: f64,
}

impl Mollifier {
    pub fn new(epsilon: f64) -> Mollifier {
        assert!(epsilon > 0.0 && epsilon.is_finite());
        Mollifier { epsilon }
    }

    /// The unnormalized bump profile at distance r (support r < epsilon).
    fn profile(&self, r: f64) -> f64 {
        let u = r / self.epsilon;
        if u >= 1.0 {
            0.0
        } else {
            (-1.0 / (1.0 - u * u)).exp()
        }
    }
}

/// Distance from the support of f to the boundary of its box.
fn support_margin(f: &SampledFunction) -> f64 {
    let mut margin = f64::INFINITY;
    for (flat, &v) in f.values().iter().enumerate() {
        if v != 0.0 {
            let p = f.node(flat);
            for (c, a) in p.coords().iter().zip(f.axes()) {
                margin = margin.min(c - a.lo).min(a.hi - c);
            }
        }
    }
    margin
}

/// Discrete convolution with the normalized kernel. The function must be
/// compactly supported with margin at least epsilon inside its box, so the
/// mollified support stays inside.
pub fn mollify(f: &SampledFunction, m: &Mollifier) -> Result<SampledFunction, ModularError> {
    let margin = support_margin(f);
    if margin < m.epsilon {
        return Err(ModularError::MarginViolation { margin, epsilon: m.epsilon });
    }
    let dim = f.axes().len();
    let spacings: Vec<f64> = f.axes().iter().map(Axis::spacing).collect();
    let reach: Vec<isize> =
        spacings.iter().map(|&h| (m.epsilon / h).ceil() as isize).collect();

    let mut out = SampledFunction::zero_like(f);
    let n: Vec<isize> = f.axes().iter().map(|a| a.n as isize).collect();
    let mut multi = vec![0isize; dim];
    for flat in 0..f.len() {
        // decode multi-index of flat
        {
            let mut rem = flat;
            for (a, m) in multi.iter_mut().enumerate() {
                *m = (rem % f.axes()[a].n) as isize;
                rem /= f.axes()[a].n;
            }
        }
        let mut acc = 0.0f64;
        let mut norm = 0.0f64;
        let mut offset: Vec<isize> = reach.iter().map(|&r| -r).collect();
        // iterate the offset box
        'offsets: loop {
            let mut inside = true;
            let mut r2 = 0.0f64;
            let mut src = 0usize;
            let mut stride = 1usize;
            for a in 0..dim {
                let j = multi[a] + offset[a];
                if j < 0 || j >= n[a] {
                    inside = false;
                    break;
                }
                let d = offset[a] as f64 * spacings[a];
                r2 += d * d;
                src += j as usize * stride;
                stride *= f.axes()[a].n;
            }
            if inside {
                let k = m.profile(r2.sqrt());
                if k > 0.0 {
                    acc += k * f.values()[src];
                    norm += k;
                }
            }
            // increment offsets
            let mut a = 0;
            loop {
                offset[a] += 1;
                if offset[a] <= reach[a] {
                    break;
                }
                offset[a] = -reach[a];
                a += 1;
                if a == dim {
                    break 'offsets;
                }
            }
        }
        out.values[flat] = if norm > 0.0 { acc / norm } else { 0.0 };
    }
    Ok(out)
}

/// Per-axis central differences (one-sided at the ends).
pub fn gradient(f: &SampledFunction) -> Vec<SampledFunction> {
    let dim = f.axes().len();
    let mut comps = Vec::with_capacity(dim);
    for a in 0..dim {
        let h = f.axes()[a].spacing();
        let n = f.axes()[a].n;
        let mut g = SampledFunction::zero_like(f);
        let stride: usize = f.axes()[..a].iter().map(|ax| ax.n).product();
        for flat in 0..f.len() {
            let i = (flat / stride) % n;
            let v = if i == 0 {
                (f.values()[flat + stride] - f.values()[flat]) / h
            } else if i == n - 1 {
                (f.values()[flat] - f.values()[flat - stride]) / h
            } else {
                (f.values()[flat + stride] - f.values()[flat - stride]) / (2.0 * h)
            };
            g.values[flat] = v;
        }
        comps.push(g);
    }
    comps
}

/// Pointwise Euclidean magnitude of the gradient.
pub fn gradient_magnitude(f: &SampledFunction) -> SampledFunction {
    let comps = gradient(f);
    let mut out = SampledFunction::zero_like(f);
    for flat in 0..f.len() {
        let s: f64 = comps.iter().map(|c| c.values()[flat] * c.values()[flat]).sum();
        out.values[flat] = s.sqrt();
    }
    out
}

#[derive(Clone, Debug)]
pub struct DensityRow {
    pub epsilon: f64,
    /// `|| f * sigma_eps - f ||_phi`
    pub norm: f64,
    /// `|| |grad(f * sigma_eps) - grad f| ||_phi`
    pub grad_norm: f64,
}

#[derive(Clone, Debug)]
pub struct DensityTable {
    pub rows: Vec<DensityRow>,
    pub f_norm: f64,
    pub f_grad_norm: f64,
}

/// The mollification-convergence experiment: for each epsilon, the
/// Luxemburg norm of `f * sigma_eps - f` (and of the gradient
/// difference). The family must satisfy (A1) on the bounded envelope of
/// the support dilated by 1, which is checked first.
pub fn density_experiment(
    family: &PhiFamily,
    f: &SampledFunction,
    eps_sequence: &[f64],
) -> Result<DensityTable, ModularError> {
    assert!(eps_sequence.windows(2).all(|w| w[1] < w[0]), "epsilons must decrease");
    assert!(eps_sequence.iter().all(|&e| e > 0.0 && e < 1.0));

    // envelope: the support's bounding box dilated by 1
    let mut lo = vec![f64::INFINITY; f.axes().len()];
    let mut hi = vec![f64::NEG_INFINITY; f.axes().len()];
    let mut any = false;
    for (flat, &v) in f.values().iter().enumerate() {
        if v != 0.0 {
            any = true;
            for (a, c) in f.node(flat).coords().iter().enumerate() {
                lo[a] = lo[a].min(*c);
                hi[a] = hi[a].max(*c);
            }
        }
    }
    if !any {
        return Ok(DensityTable {
            rows: eps_sequence
                .iter()
                .map(|&epsilon| DensityRow { epsilon, norm: 0.0, grad_norm: 0.0 })
                .collect(),
            f_norm: 0.0,
            f_grad_norm: 0.0,
        });
    }
    let env_lo: Vec<f64> = lo.iter().map(|c| c - 1.0).collect();
    let env_hi: Vec<f64> = hi.iter().map(|c| c + 1.0).collect();
    let envelope = SpatialDomain::new_box(env_lo, env_hi)
        .expect("support bounding box dilated by 1 is a valid box");
    let env_plan = SamplePlan::default_for(&envelope);
    let a1 = check_a1(family, &env_plan);
    if !a1.report.holds() {
        return Err(ModularError::A1Violated(Box::new(a1.report)));
    }

    let f_norm = luxemburg_norm(family, f)?;
    let f_grad = gradient_magnitude(f);
    let f_grad_norm = luxemburg_norm(family, &f_grad)?;

    let mut rows = Vec::with_capacity(eps_sequence.len());
    for &epsilon in eps_sequence {
        let g = mollify(f, &Mollifier::new(epsilon))?;
        let diff = g.sub(f)?;
        let norm = luxemburg_norm(family, &diff)?;
        let grad_diff = gradient_magnitude(&g).sub(&gradient_magnitude(f))?;
        let grad_norm = luxemburg_norm(family, &grad_diff)?;
        rows.push(DensityRow { epsilon, norm, grad_norm });
    }
    Ok(DensityTable { rows, f_norm, f_grad_norm })
}

/// The smooth bump `exp(-1/(1 - (|x|/radius)^2))` supported on
/// `|x| < radius`.
pub fn bump(radius: f64) -> impl Fn(&Point) -> f64 {
    move |p: &Point| {
        let u = p.norm() / radius;
        if u >= 1.0 {
            0.0
        } else {
            (-1.0 / (1.0 - u * u)).exp()
        }
    }
}
