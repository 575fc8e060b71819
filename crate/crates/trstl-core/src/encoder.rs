//! MILP encoding of time robustness over a symbolic trajectory.
//!
//! Each distinct predicate gets, for every `t in [0, H]`, a binary `z_t`
//! tied to the sign of `mu(x_t)` by an indicator pair, and two run-length
//! counters
//!
//! ```text
//! c1_t = (c1_{t+1} + 1) * z_t          c1_{H+1} = 0
//! c0_t = (c0_{t+1} - 1) * (1 - z_t)    c0_{H+1} = 0
//! ```
//!
//! linearized with the boolean-affine product construct. `c1_t` counts the
//! consecutive `z = 1` steps from `t` rightward, `c0_t` counts `z = 0` steps
//! negatively, and the right time robustness of the predicate is the linear
//! combination `theta_t = c1_t + c0_t - (2 z_t - 1)`. For the left side the
//! counters run forward from a zero boundary at `t = -1`, which mirrors the
//! clipped left robustness of the monitor exactly.
//!
//! Operator nodes are windows of integer theta variables related to their
//! children by min/max gadgets; windows are kept minimal via
//! [`needed_window`], which is what keeps variable and constraint counts
//! affine in the horizon for a fixed formula.

use crate::formula::{Formula, LinearPredicate};
use crate::milp::{
    add_bool_affine_product, add_indicator, add_max, add_min, LinExpr, MilpError, MilpModel,
    Sense, VarId,
};
use crate::monitor::Side;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use std::collections::{BTreeMap, HashMap};
use std::io::Write;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EncodeError {
    #[error(transparent)]
    Milp(#[from] MilpError),
    #[error("state box dimension {got} does not match predicate dimension {expected}")]
    BoxDimension { expected: usize, got: usize },
    #[error("state box has lower > upper in dimension {dim}")]
    MalformedBox { dim: usize },
    #[error("horizon {horizon} is too small for formula horizon {needed}")]
    HorizonTooSmall { horizon: usize, needed: usize },
    #[error("symbolic trajectory has {got} steps, config expects {expected}")]
    TrajectoryLength { expected: usize, got: usize },
    #[error("window [{lo}, {hi}] exceeds the valid domain [0, {max}]")]
    WindowOutOfRange { lo: usize, hi: usize, max: usize },
}

/// Encoding parameters: indicator tolerance, horizon, robustness side and
/// the bounded state domain the big-M constants are derived from.
#[derive(Debug, Clone)]
pub struct EncoderConfig {
    pub eps: BigRational,
    pub horizon: usize,
    pub side: Side,
    pub state_box: Vec<(BigRational, BigRational)>,
}

/// Contiguous time window `[lo, hi]`.
pub type Window = (usize, usize);

/// Variables created for one formula node.
#[derive(Debug, Clone)]
pub struct EncodedNode {
    pub side: Side,
    pub window: Window,
    /// Integer robustness variable per window time, bounds `[-(H+1), H+1]`.
    pub theta: BTreeMap<usize, VarId>,
    /// Predicates only: sign binaries over the full `[0, H]`.
    pub z: BTreeMap<usize, VarId>,
    /// Predicates only: run counters, keyed by a signed index so the zero
    /// boundary cell (`H+1` right, `-1` left) is included.
    pub c1: BTreeMap<i64, VarId>,
    pub c0: BTreeMap<i64, VarId>,
}

/// Exact range `(max, min)` of `mu` over a box, evaluated corner-wise.
pub fn bounds_for_predicate(
    p: &LinearPredicate,
    state_box: &[(BigRational, BigRational)],
) -> Result<(BigRational, BigRational), EncodeError> {
    if state_box.len() != p.dim() {
        return Err(EncodeError::BoxDimension { expected: p.dim(), got: state_box.len() });
    }
    let mut hi = p.offset().clone();
    let mut lo = p.offset().clone();
    for (i, c) in p.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let (lb, ub) = &state_box[i];
        if lb > ub {
            return Err(EncodeError::MalformedBox { dim: i });
        }
        if c.is_positive() {
            hi += c * ub;
            lo += c * lb;
        } else {
            hi += c * lb;
            lo += c * ub;
        }
    }
    Ok((hi, lo))
}

/// Per-child windows needed to define a parent on `window`. Negation and
/// junctions pass the window through; `G/F[a,b]` widen it by the interval;
/// `U[a,b]` needs the right child on `[lo+a, hi+b]` and the left child on
/// `[lo, hi+b-1]` (`None` when that range is empty). Predicates take no
/// children and are always encoded on the full `[0, H]`.
pub fn needed_window(node: &Formula, window: Window) -> Vec<Option<Window>> {
    let (lo, hi) = window;
    match node {
        Formula::Predicate(_) => vec![],
        Formula::Not(_) => vec![Some(window)],
        Formula::And(cs) | Formula::Or(cs) => cs.iter().map(|_| Some(window)).collect(),
        Formula::Always(i, _) | Formula::Eventually(i, _) => {
            vec![Some((lo + i.lo(), hi + i.hi()))]
        }
        Formula::Until(_, i, _) => {
            let lhs = (hi + i.hi())
                .checked_sub(1)
                .filter(|l_hi| *l_hi >= lo)
                .map(|l_hi| (lo, l_hi));
            vec![lhs, Some((lo + i.lo(), hi + i.hi()))]
        }
    }
}

/// Big-M dominating every spread between robustness values in
/// `[-(H+1), H+1]`.
fn theta_big_m(horizon: usize) -> BigRational {
    BigRational::from_integer((2 * (horizon as i64 + 2)).into())
}

fn theta_bound(horizon: usize) -> BigRational {
    BigRational::from_integer((horizon as i64 + 1).into())
}

fn mu_expr(p: &LinearPredicate, state: &[VarId]) -> LinExpr {
    let mut mu = LinExpr::constant(p.offset().clone());
    for (i, c) in p.coeffs().iter().enumerate() {
        if !c.is_zero() {
            mu = mu.add_term(c.clone(), state[i]);
        }
    }
    mu
}

/// Encodes one predicate over the full trajectory. `state_vars[t]` are the
/// symbolic state coordinates at step `t`; `pred_idx` keys variable names.
pub fn encode_predicate(
    model: &mut MilpModel,
    p: &LinearPredicate,
    pred_idx: usize,
    state_vars: &[Vec<VarId>],
    config: &EncoderConfig,
) -> Result<EncodedNode, EncodeError> {
    let h = config.horizon;
    if state_vars.len() != h + 1 {
        return Err(EncodeError::TrajectoryLength { expected: h + 1, got: state_vars.len() });
    }
    let (m_upper, m_lower) = bounds_for_predicate(p, &config.state_box)?;
    let bound = theta_bound(h);
    let one = BigRational::one();
    let two = BigRational::from_integer(2.into());

    let mut z = BTreeMap::new();
    for t in 0..=h {
        let zt = model.add_binary(format!("z{pred_idx}_{t}"))?;
        add_indicator(model, &mu_expr(p, &state_vars[t]), zt, &m_upper, &m_lower, &config.eps)?;
        z.insert(t, zt);
    }

    // counter cells, including the zero boundary one step past the run
    // direction
    let (boundary, step): (i64, i64) = match config.side {
        Side::Right => (h as i64 + 1, 1),
        Side::Left => (-1, -1),
    };
    let mut c1 = BTreeMap::new();
    let mut c0 = BTreeMap::new();
    for raw in 0..=h as i64 + 1 {
        let idx = match config.side {
            Side::Right => raw,
            Side::Left => raw - 1,
        };
        let suffix = if idx < 0 { "pre".to_string() } else { idx.to_string() };
        let (l1, u1, l0, u0) = if idx == boundary {
            (BigRational::zero(), BigRational::zero(), BigRational::zero(), BigRational::zero())
        } else {
            (BigRational::zero(), bound.clone(), -bound.clone(), BigRational::zero())
        };
        c1.insert(idx, model.add_integer(format!("cp{pred_idx}_{suffix}"), l1, u1)?);
        c0.insert(idx, model.add_integer(format!("cn{pred_idx}_{suffix}"), l0, u0)?);
    }

    let mut theta = BTreeMap::new();
    for t in 0..=h {
        let ti = t as i64;
        let prev = ti + step; // cell the recursion chains from
        let zt = z[&t];
        let z_expr = LinExpr::var(zt);
        let not_z = LinExpr::constant(one.clone()).add_term(-one.clone(), zt);
        // c1_t = (c1_prev + 1) * z_t with product bounds [0, H+1]
        let x1 = LinExpr::var(c1[&prev]).add_constant(one.clone());
        add_bool_affine_product(model, c1[&ti], &z_expr, &x1, &BigRational::zero(), &bound)?;
        // c0_t = (c0_prev - 1) * (1 - z_t) with product bounds [-(H+1), 0]
        let x0 = LinExpr::var(c0[&prev]).add_constant(-one.clone());
        add_bool_affine_product(model, c0[&ti], &not_z, &x0, &(-bound.clone()), &BigRational::zero())?;
        // theta_t = c1_t + c0_t - (2 z_t - 1)
        let th = model.add_integer(format!("thp{pred_idx}_{t}"), -bound.clone(), bound.clone())?;
        let def = LinExpr::var(th)
            .add_term(-one.clone(), c1[&ti])
            .add_term(-one.clone(), c0[&ti])
            .add_term(two.clone(), zt)
            .add_constant(-one.clone());
        model.constrain(&def, Sense::Eq)?;
        theta.insert(t, th);
    }
    Ok(EncodedNode { side: config.side, window: (0, h), theta, z, c1, c0 })
}

/// Combines already-encoded children into an operator node over `window`.
pub fn encode_operator(
    model: &mut MilpModel,
    node: &Formula,
    node_idx: usize,
    children: &[&EncodedNode],
    window: Window,
    config: &EncoderConfig,
) -> Result<EncodedNode, EncodeError> {
    let h = config.horizon;
    let (w_lo, w_hi) = window;
    let max_t = h
        .checked_sub(node.horizon())
        .ok_or(EncodeError::HorizonTooSmall { horizon: h, needed: node.horizon() })?;
    if w_hi > max_t {
        return Err(EncodeError::WindowOutOfRange { lo: w_lo, hi: w_hi, max: max_t });
    }
    for (child, need) in children.iter().zip(needed_window(node, window)) {
        if let Some((lo, hi)) = need {
            let (have_lo, have_hi) = child.window;
            if lo < have_lo || hi > have_hi || child.theta.is_empty() {
                return Err(EncodeError::WindowOutOfRange { lo, hi, max: have_hi });
            }
        }
    }
    let bound = theta_bound(h);
    let big_m = theta_big_m(h);
    let one = BigRational::one();
    let mut theta = BTreeMap::new();
    match node {
        Formula::Predicate(_) => unreachable!("predicates are encoded by encode_predicate"),
        Formula::Not(_) => {
            for t in w_lo..=w_hi {
                let th = model.add_integer(format!("th{node_idx}_{t}"), -bound.clone(), bound.clone())?;
                let def = LinExpr::var(th).add_term(one.clone(), children[0].theta[&t]);
                model.constrain(&def, Sense::Eq)?;
                theta.insert(t, th);
            }
        }
        Formula::And(_) | Formula::Or(_) => {
            let is_min = matches!(node, Formula::And(_));
            for t in w_lo..=w_hi {
                let th = model.add_integer(format!("th{node_idx}_{t}"), -bound.clone(), bound.clone())?;
                let rs: Vec<VarId> = children.iter().map(|c| c.theta[&t]).collect();
                if is_min {
                    add_min(model, th, &rs, &big_m)?;
                } else {
                    add_max(model, th, &rs, &big_m)?;
                }
                theta.insert(t, th);
            }
        }
        Formula::Always(i, _) | Formula::Eventually(i, _) => {
            let is_min = matches!(node, Formula::Always(..));
            for t in w_lo..=w_hi {
                let th = model.add_integer(format!("th{node_idx}_{t}"), -bound.clone(), bound.clone())?;
                let rs: Vec<VarId> = (t + i.lo()..=t + i.hi())
                    .map(|tp| children[0].theta[&tp])
                    .collect();
                if is_min {
                    add_min(model, th, &rs, &big_m)?;
                } else {
                    add_max(model, th, &rs, &big_m)?;
                }
                theta.insert(t, th);
            }
        }
        Formula::Until(_, i, _) => {
            let (lhs, rhs) = (children[0], children[1]);
            for t in w_lo..=w_hi {
                let th = model.add_integer(format!("th{node_idx}_{t}"), -bound.clone(), bound.clone())?;
                let mut candidates = Vec::with_capacity(i.hi() - i.lo() + 1);
                for tp in t + i.lo()..=t + i.hi() {
                    if tp == t {
                        // inner range empty: the candidate is theta_rhs(t)
                        candidates.push(rhs.theta[&tp]);
                        continue;
                    }
                    let aux = model.add_integer(
                        format!("ax{node_idx}_{t}_{tp}"),
                        -bound.clone(),
                        bound.clone(),
                    )?;
                    let mut rs = vec![rhs.theta[&tp]];
                    rs.extend((t..tp).map(|u| lhs.theta[&u]));
                    add_min(model, aux, &rs, &big_m)?;
                    candidates.push(aux);
                }
                add_max(model, th, &candidates, &big_m)?;
                theta.insert(t, th);
            }
        }
    }
    Ok(EncodedNode {
        side: config.side,
        window,
        theta,
        z: BTreeMap::new(),
        c1: BTreeMap::new(),
        c0: BTreeMap::new(),
    })
}

/// One indicator pair; lets a post-solve pass restate the sign constraints
/// with extra slack while keeping the binary pattern.
#[derive(Debug, Clone)]
pub struct IndicatorRecord {
    pub pred_idx: usize,
    pub t: usize,
    pub z: VarId,
    pub mu: LinExpr,
}

/// Full encoding of a formula.
#[derive(Debug)]
pub struct EncodedFormula {
    /// Root robustness variable at `t = 0`.
    pub root_theta: VarId,
    /// Pre-order node index -> encoded node; structurally equal predicates
    /// share their variables, and subtrees never consulted (until with an
    /// empty left window) keep empty placeholder entries.
    pub nodes: Vec<EncodedNode>,
    pub indicators: Vec<IndicatorRecord>,
}

/// Encodes `phi` rooted at `t = 0`: windows are computed top-down, distinct
/// predicates once over the whole horizon, operators bottom-up.
pub fn encode_formula(
    model: &mut MilpModel,
    phi: &Formula,
    state_vars: &[Vec<VarId>],
    config: &EncoderConfig,
) -> Result<EncodedFormula, EncodeError> {
    if config.horizon < phi.horizon() {
        return Err(EncodeError::HorizonTooSmall {
            horizon: config.horizon,
            needed: phi.horizon(),
        });
    }
    let mut ctx = EncodeCtx {
        config,
        state_vars,
        shared: HashMap::new(),
        indicators: Vec::new(),
        pred_count: 0,
        node_counter: 0,
        nodes: Vec::new(),
    };
    let root = ctx.encode(model, phi, (0, 0))?;
    let root_theta = root.theta[&0];
    Ok(EncodedFormula { root_theta, nodes: ctx.nodes, indicators: ctx.indicators })
}

struct EncodeCtx<'a> {
    config: &'a EncoderConfig,
    state_vars: &'a [Vec<VarId>],
    shared: HashMap<LinearPredicate, EncodedNode>,
    indicators: Vec<IndicatorRecord>,
    pred_count: usize,
    node_counter: usize,
    nodes: Vec<EncodedNode>,
}

impl EncodeCtx<'_> {
    fn encode(
        &mut self,
        model: &mut MilpModel,
        node: &Formula,
        window: Window,
    ) -> Result<EncodedNode, EncodeError> {
        let my_idx = self.node_counter;
        self.node_counter += 1;
        self.nodes.push(self.placeholder());
        let encoded = if let Formula::Predicate(p) = node {
            if let Some(existing) = self.shared.get(p) {
                existing.clone()
            } else {
                let idx = self.pred_count;
                self.pred_count += 1;
                let enc = encode_predicate(model, p, idx, self.state_vars, self.config)?;
                for (t, z) in &enc.z {
                    self.indicators.push(IndicatorRecord {
                        pred_idx: idx,
                        t: *t,
                        z: *z,
                        mu: mu_expr(p, &self.state_vars[*t]),
                    });
                }
                self.shared.insert(p.clone(), enc.clone());
                enc
            }
        } else {
            let child_windows = needed_window(node, window);
            let child_formulas: Vec<&Formula> = match node {
                Formula::Not(f) | Formula::Always(_, f) | Formula::Eventually(_, f) => vec![f],
                Formula::And(cs) | Formula::Or(cs) => cs.iter().collect(),
                Formula::Until(l, _, r) => vec![l, r],
                Formula::Predicate(_) => unreachable!(),
            };
            let mut encoded_children = Vec::with_capacity(child_formulas.len());
            for (child, need) in child_formulas.iter().zip(child_windows) {
                match need {
                    Some(w) => encoded_children.push(self.encode(model, child, w)?),
                    None => {
                        // subtree never consulted; keep pre-order indices
                        // aligned with placeholder slots
                        let skipped = child.subformulas().len();
                        self.node_counter += skipped;
                        for _ in 0..skipped {
                            self.nodes.push(self.placeholder());
                        }
                        encoded_children.push(self.placeholder());
                    }
                }
            }
            let refs: Vec<&EncodedNode> = encoded_children.iter().collect();
            encode_operator(model, node, my_idx, &refs, window, self.config)?
        };
        self.nodes[my_idx] = encoded.clone();
        Ok(encoded)
    }

    fn placeholder(&self) -> EncodedNode {
        EncodedNode {
            side: self.config.side,
            window: (0, 0),
            theta: BTreeMap::new(),
            z: BTreeMap::new(),
            c1: BTreeMap::new(),
            c0: BTreeMap::new(),
        }
    }
}

impl EncodedFormula {
    /// Debug dump of variable names by `(node_id, t, role)`; `role` is one
    /// of `theta`, `z`, `c1`, `c0`.
    pub fn dump_vars<W: Write>(&self, model: &MilpModel, mut w: W) -> std::io::Result<()> {
        writeln!(w, "node,t,role,var")?;
        for (idx, node) in self.nodes.iter().enumerate() {
            for (t, v) in &node.theta {
                writeln!(w, "{idx},{t},theta,{}", model.var(*v).name)?;
            }
            for (t, v) in &node.z {
                writeln!(w, "{idx},{t},z,{}", model.var(*v).name)?;
            }
            for (t, v) in &node.c1 {
                writeln!(w, "{idx},{t},c1,{}", model.var(*v).name)?;
            }
            for (t, v) in &node.c0 {
                writeln!(w, "{idx},{t},c0,{}", model.var(*v).name)?;
            }
        }
        Ok(())
    }
}
