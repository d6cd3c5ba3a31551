//! Plant and controller models, augmentation to square physically
//! realizable systems, closed-loop composition and controller noise
//! synthesis.
//!
//! General-kind matrices are stored block by block in doubled-up form: a
//! block acting from `(u, u#)` to `(x, x#)` is a single doubled matrix.
//! When several blocks are stacked (states of plant and controller, or
//! several noise inputs) the paired order `(x1, x1#, x2, x2#)` is permuted
//! to canonical doubled-up order `(x1, x2, x1#, x2#)` before any
//! structural or PR computation.

mod augment;
mod modified;
mod synth;

pub use augment::{augment_controller, augment_plant, Augmentation};
pub use modified::{modified_forms, ModifiedPair};
pub use synth::{synth_noise_annihilation, synth_noise_general, synth_noise_general_seeded, SynthResult};

use crate::dmat::canonical_order;
use crate::dmat::{block2, eye, hcat, is_doubled, max_abs, permute, CMat, Cx};
use crate::error::{Error, Result};
use crate::qsys::SystemKind;
use crate::tol;
use crate::xfer::{tf_eval, StateSpaceTF};

/// Cost output `Z = C x + D u (+ E w)`. `e` acts on the plant noise and is
/// only needed to express modified forms exactly; it defaults to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct CostOutput {
    pub c: CMat,
    pub d: CMat,
    pub e: Option<CMat>,
}

impl CostOutput {
    pub fn new(c: CMat, d: CMat) -> Self {
        Self { c, d, e: None }
    }

    pub fn rows(&self) -> usize {
        self.c.nrows()
    }

    /// `E`, materialized as zeros when absent.
    pub fn e_or_zero(&self, noise_cols: usize) -> CMat {
        self.e.clone().unwrap_or_else(|| CMat::zeros(self.c.nrows(), noise_cols))
    }
}

/// Plant with noise input W, control input U, output Y and optional cost.
/// There is no feedthrough from U to Y.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantModel {
    pub kind: SystemKind,
    pub f: CMat,
    pub g_w: CMat,
    pub g_u: CMat,
    pub h: CMat,
    pub k: CMat,
    pub cost: Option<CostOutput>,
}

/// `(n, m_w, m_u, m_y)` in modes / fields (halves for general systems).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlantDims {
    pub n: usize,
    pub m_w: usize,
    pub m_u: usize,
    pub m_y: usize,
}

/// `(n_c, m_w̃, m_y, m_u)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ControllerDims {
    pub n_c: usize,
    pub m_wt: usize,
    pub m_y: usize,
    pub m_u: usize,
}

fn check_width(kind: SystemKind, what: &str, v: usize) -> Result<usize> {
    let w = kind.width();
    if !v.is_multiple_of(w) {
        return Err(Error::dim(format!("{what}: {v} is not a multiple of {w}")));
    }
    Ok(v / w)
}

fn check_doubled(kind: SystemKind, pairs: &[(&str, &CMat)]) -> Result<()> {
    if kind != SystemKind::General {
        return Ok(());
    }
    for (name, m) in pairs {
        if m.nrows() == 0 || m.ncols() == 0 {
            continue;
        }
        let r = is_doubled(m, tol::STRUCTURE * (1.0 + max_abs(m)))?;
        if !r.doubled {
            return Err(Error::Domain(format!("{name} is not doubled-up (deviation {:.3e})", r.deviation)));
        }
    }
    Ok(())
}

fn shape_err(what: &str, got: (usize, usize), want: (usize, usize)) -> Error {
    Error::dim(format!("{what} has shape {got:?}, expected {want:?}"))
}

fn expect_shape(what: &str, m: &CMat, want: (usize, usize)) -> Result<()> {
    if m.shape() != want {
        return Err(shape_err(what, m.shape(), want));
    }
    Ok(())
}

impl PlantModel {
    pub fn new(kind: SystemKind, f: CMat, g_w: CMat, g_u: CMat, h: CMat, k: CMat) -> Result<Self> {
        let p = Self { kind, f, g_w, g_u, h, k, cost: None };
        p.validate()?;
        Ok(p)
    }

    pub fn with_cost(mut self, cost: CostOutput) -> Result<Self> {
        self.cost = Some(cost);
        self.validate()?;
        Ok(self)
    }

    pub fn dims(&self) -> PlantDims {
        let w = self.kind.width();
        PlantDims {
            n: self.f.nrows() / w,
            m_w: self.g_w.ncols() / w,
            m_u: self.g_u.ncols() / w,
            m_y: self.h.nrows() / w,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let kind = self.kind;
        let s = self.f.nrows();
        if !self.f.is_square() {
            return Err(Error::dim("plant F must be square"));
        }
        check_width(kind, "plant state dimension", s)?;
        check_width(kind, "plant noise dimension", self.g_w.ncols())?;
        check_width(kind, "plant control dimension", self.g_u.ncols())?;
        check_width(kind, "plant output dimension", self.h.nrows())?;
        expect_shape("plant G_w", &self.g_w, (s, self.g_w.ncols()))?;
        expect_shape("plant G_u", &self.g_u, (s, self.g_u.ncols()))?;
        expect_shape("plant H", &self.h, (self.h.nrows(), s))?;
        expect_shape("plant K", &self.k, (self.h.nrows(), self.g_w.ncols()))?;
        check_doubled(
            kind,
            &[
                ("plant F", &self.f),
                ("plant G_w", &self.g_w),
                ("plant G_u", &self.g_u),
                ("plant H", &self.h),
                ("plant K", &self.k),
            ],
        )?;
        if let Some(c) = &self.cost {
            expect_shape("cost C", &c.c, (c.c.nrows(), s))?;
            expect_shape("cost D", &c.d, (c.c.nrows(), self.g_u.ncols()))?;
            if let Some(e) = &c.e {
                expect_shape("cost E", e, (c.c.nrows(), self.g_w.ncols()))?;
            }
        }
        Ok(())
    }

    /// `W → Y`, `U → Y` as one transfer function with inputs `[W; U]`.
    pub fn output_tf(&self) -> StateSpaceTF {
        let s = self.f.nrows();
        let b = hcat(s, &[&self.g_w, &self.g_u]).expect("validated shapes");
        let d = hcat(self.h.nrows(), &[&self.k, &CMat::zeros(self.h.nrows(), self.g_u.ncols())]).expect("validated");
        StateSpaceTF::new(self.f.clone(), b, self.h.clone(), d).expect("validated shapes")
    }

    /// `[W; U] → Z`; requires a cost.
    pub fn cost_tf(&self) -> Result<StateSpaceTF> {
        let cost = self.cost.as_ref().ok_or_else(|| Error::Domain("plant has no cost output".into()))?;
        let b = hcat(self.f.nrows(), &[&self.g_w, &self.g_u])?;
        let e = cost.e_or_zero(self.g_w.ncols());
        let d = hcat(cost.rows(), &[&e, &cost.d])?;
        StateSpaceTF::new(self.f.clone(), b, cost.c.clone(), d)
    }
}

/// Controller with noise input W̃, input Y and output U.
#[derive(Debug, Clone, PartialEq)]
pub struct ControllerModel {
    pub kind: SystemKind,
    pub f_c: CMat,
    pub g_cw: CMat,
    pub g_cy: CMat,
    pub h_c: CMat,
    pub k_cw: CMat,
    pub k_cy: CMat,
}

impl ControllerModel {
    pub fn new(kind: SystemKind, f_c: CMat, g_cw: CMat, g_cy: CMat, h_c: CMat, k_cw: CMat, k_cy: CMat) -> Result<Self> {
        let c = Self { kind, f_c, g_cw, g_cy, h_c, k_cw, k_cy };
        c.validate()?;
        Ok(c)
    }

    /// Static controller `U = K_cw W̃ + K_cy Y`.
    pub fn static_gain(kind: SystemKind, k_cw: CMat, k_cy: CMat) -> Result<Self> {
        let (mu, mwt) = k_cw.shape();
        let my = k_cy.ncols();
        Self::new(kind, CMat::zeros(0, 0), CMat::zeros(0, mwt), CMat::zeros(0, my), CMat::zeros(mu, 0), k_cw, k_cy)
    }

    /// The trivial controller `U = W̃` (m_w̃ = m_u, no states, no use of Y).
    pub fn trivial(kind: SystemKind, m_u: usize, m_y: usize) -> Self {
        let w = kind.width();
        Self::static_gain(kind, eye(w * m_u), CMat::zeros(w * m_u, w * m_y)).expect("trivial controller shapes")
    }

    pub fn dims(&self) -> ControllerDims {
        let w = self.kind.width();
        ControllerDims {
            n_c: self.f_c.nrows() / w,
            m_wt: self.g_cw.ncols() / w,
            m_y: self.g_cy.ncols() / w,
            m_u: self.h_c.nrows() / w,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let kind = self.kind;
        let s = self.f_c.nrows();
        if !self.f_c.is_square() {
            return Err(Error::dim("controller F_c must be square"));
        }
        check_width(kind, "controller state dimension", s)?;
        check_width(kind, "controller noise dimension", self.g_cw.ncols())?;
        check_width(kind, "controller input dimension", self.g_cy.ncols())?;
        check_width(kind, "controller output dimension", self.h_c.nrows())?;
        let (mwt, my, mu) = (self.g_cw.ncols(), self.g_cy.ncols(), self.h_c.nrows());
        expect_shape("controller G_cw", &self.g_cw, (s, mwt))?;
        expect_shape("controller G_cy", &self.g_cy, (s, my))?;
        expect_shape("controller H_c", &self.h_c, (mu, s))?;
        expect_shape("controller K_cw", &self.k_cw, (mu, mwt))?;
        expect_shape("controller K_cy", &self.k_cy, (mu, my))?;
        check_doubled(
            kind,
            &[
                ("controller F_c", &self.f_c),
                ("controller G_cw", &self.g_cw),
                ("controller G_cy", &self.g_cy),
                ("controller H_c", &self.h_c),
                ("controller K_cw", &self.k_cw),
                ("controller K_cy", &self.k_cy),
            ],
        )
    }

    /// `[W̃; Y] → U`.
    pub fn tf(&self) -> StateSpaceTF {
        let b = hcat(self.f_c.nrows(), &[&self.g_cw, &self.g_cy]).expect("validated");
        let d = hcat(self.h_c.nrows(), &[&self.k_cw, &self.k_cy]).expect("validated");
        StateSpaceTF::new(self.f_c.clone(), b, self.h_c.clone(), d).expect("validated")
    }
}

/// A named index range of closed-loop noise inputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Channel {
    pub name: String,
    pub start: usize,
    pub len: usize,
}

/// Closed loop from all noises `[W; W̃]` to the cost output `Z`.
#[derive(Debug, Clone)]
pub struct ClosedLoop {
    pub kind: SystemKind,
    /// Canonical order (general kind) or plain order (annihilation).
    pub system: StateSpaceTF,
    /// Paired block order `(x, x#, x_c, x_c#)`, inputs `(W, W#, W̃, W̃#)`.
    pub raw: StateSpaceTF,
    pub channels: Vec<Channel>,
    pub internally_stable: bool,
    pub plant_states: usize,
    pub controller_states: usize,
}

impl ClosedLoop {
    pub fn state_matrix(&self) -> &CMat {
        self.system.a()
    }
}

pub(crate) fn check_loop_dims(p: &PlantModel, c: &ControllerModel) -> Result<()> {
    if p.kind != c.kind {
        return Err(Error::dim("plant and controller kinds differ"));
    }
    let (pd, cd) = (p.dims(), c.dims());
    if pd.m_u != cd.m_u {
        return Err(Error::dim(format!("controller drives {} inputs, plant has {}", cd.m_u, pd.m_u)));
    }
    if pd.m_y != cd.m_y {
        return Err(Error::dim(format!("controller reads {} outputs, plant has {}", cd.m_y, pd.m_y)));
    }
    Ok(())
}

/// Raw (paired-order) closed-loop matrices for a given plant cost.
pub(crate) struct RawLoop {
    pub a: CMat,
    pub b: CMat,
    pub c: CMat,
    pub d: CMat,
}

pub(crate) fn raw_loop(p: &PlantModel, c: &ControllerModel, cost: Option<&CostOutput>) -> Result<RawLoop> {
    check_loop_dims(p, c)?;
    let n = p.f.nrows();
    let nc = c.f_c.nrows();
    let a = block2(&(&p.f + &p.g_u * &c.k_cy * &p.h), &(&p.g_u * &c.h_c), &(&c.g_cy * &p.h), &c.f_c)?;
    let b = block2(&(&p.g_w + &p.g_u * &c.k_cy * &p.k), &(&p.g_u * &c.k_cw), &(&c.g_cy * &p.k), &c.g_cw)?;
    let (cm, dm) = match cost {
        Some(cost) => {
            let e = cost.e_or_zero(p.g_w.ncols());
            (
                hcat(cost.rows(), &[&(&cost.c + &cost.d * &c.k_cy * &p.h), &(&cost.d * &c.h_c)])?,
                hcat(cost.rows(), &[&(e + &cost.d * &c.k_cy * &p.k), &(&cost.d * &c.k_cw)])?,
            )
        }
        None => (CMat::zeros(0, n + nc), CMat::zeros(0, p.g_w.ncols() + c.g_cw.ncols())),
    };
    Ok(RawLoop { a, b, c: cm, d: dm })
}

/// Builds the closed loop. Output is the plant cost (empty without one).
pub fn close_loop(p: &PlantModel, c: &ControllerModel) -> Result<ClosedLoop> {
    let raw = raw_loop(p, c, p.cost.as_ref())?;
    finish_loop(p.kind, p.dims().n, c.dims().n_c, p.dims().m_w, c.dims().m_wt, raw)
}

pub(crate) fn finish_loop(
    kind: SystemKind,
    n: usize,
    n_c: usize,
    m_w: usize,
    m_wt: usize,
    raw: RawLoop,
) -> Result<ClosedLoop> {
    let raw_tf = StateSpaceTF::new(raw.a, raw.b, raw.c, raw.d)?;
    let (system, channels) = match kind {
        SystemKind::Annihilation => (
            raw_tf.clone(),
            vec![
                Channel { name: "W".into(), start: 0, len: m_w },
                Channel { name: "W~".into(), start: m_w, len: m_wt },
            ],
        ),
        SystemKind::General => {
            let so = canonical_order(&[n, n_c]);
            let io = canonical_order(&[m_w, m_wt]);
            let outs: Vec<usize> = (0..raw_tf.output_dim()).collect();
            let a = permute(raw_tf.a(), &so, &so);
            let b = permute(raw_tf.b(), &so, &io);
            let c = permute(raw_tf.c(), &outs, &so);
            let d = permute(raw_tf.d(), &outs, &io);
            (
                StateSpaceTF::new(a, b, c, d)?,
                vec![
                    Channel { name: "W".into(), start: 0, len: m_w },
                    Channel { name: "W~".into(), start: m_w, len: m_wt },
                    Channel { name: "W#".into(), start: m_w + m_wt, len: m_w },
                    Channel { name: "W~#".into(), start: 2 * m_w + m_wt, len: m_wt },
                ],
            )
        }
    };
    let guard = tol::SINGULAR;
    let internally_stable = system.poles().iter().all(|l| l.re < -guard);
    Ok(ClosedLoop { kind, system, raw: raw_tf, channels, internally_stable, plant_states: n, controller_states: n_c })
}

/// Closed-loop transfer function `[W; W̃] → Z` (canonical order for
/// general systems).
pub fn gamma_cl(p: &PlantModel, c: &ControllerModel) -> Result<StateSpaceTF> {
    if p.cost.is_none() {
        return Err(Error::Domain("closed-loop transfer function needs a plant cost".into()));
    }
    Ok(close_loop(p, c)?.system)
}

/// Evaluates `[Γz1 + M Γc2 ΓP1, M Γc1]` at `s` with
/// `M = Γz2 (I - Γc2 ΓP2)⁻¹`, in paired input order `(W, W#, W̃, W̃#)`.
/// An independent path to the closed loop, used for cross-checks.
pub fn gamma_cl_formula(p: &PlantModel, c: &ControllerModel, s: Cx) -> Result<CMat> {
    check_loop_dims(p, c)?;
    let mw = p.g_w.ncols();
    let mu = p.g_u.ncols();
    let mwt = c.g_cw.ncols();
    let gp = tf_eval(&p.output_tf(), s)?;
    let gz = tf_eval(&p.cost_tf()?, s)?;
    let gc = tf_eval(&c.tf(), s)?;
    let gp1 = gp.columns(0, mw).into_owned();
    let gp2 = gp.columns(mw, mu).into_owned();
    let gz1 = gz.columns(0, mw).into_owned();
    let gz2 = gz.columns(mw, mu).into_owned();
    let gc1 = gc.columns(0, mwt).into_owned();
    let gc2 = gc.columns(mwt, gc.ncols() - mwt).into_owned();
    let loop_m = eye(mu) - &gc2 * &gp2;
    let inv =
        crate::dmat::inverse(&loop_m).map_err(|_| Error::IllPosed(format!("I - Γc2 ΓP2 is singular at s = {s}")))?;
    let m = gz2 * inv;
    let left = gz1 + &m * &gc2 * gp1;
    let right = &m * gc1;
    hcat(left.nrows(), &[&left, &right])
}

/// Checks that `l` selects distinct physical outputs (each row a distinct
/// standard unit vector, so `L L† = I`).
pub fn check_selector(l: &CMat) -> Result<()> {
    let mut seen = vec![false; l.ncols()];
    for i in 0..l.nrows() {
        let hits: Vec<usize> = (0..l.ncols()).filter(|&j| l[(i, j)].norm() != 0.0).collect();
        if hits.len() != 1 || l[(i, hits[0])] != crate::dmat::cx(1.0, 0.0) {
            return Err(Error::Domain(format!("selector row {i} is not a standard unit vector")));
        }
        if std::mem::replace(&mut seen[hits[0]], true) {
            return Err(Error::Domain(format!("selector picks output {} twice", hits[0])));
        }
    }
    Ok(())
}

/// Splits canonical columns into the paired blocks of the first
/// `first_half` halves and the rest.
#[cfg(test)]
fn split_columns(m: &CMat, kind: SystemKind, first_half: usize) -> (CMat, CMat) {
    match kind {
        SystemKind::Annihilation => {
            (m.columns(0, first_half).into_owned(), m.columns(first_half, m.ncols() - first_half).into_owned())
        }
        SystemKind::General => {
            let half = m.ncols() / 2;
            let rest = half - first_half;
            let a =
                hcat(m.nrows(), &[&m.columns(0, first_half).into_owned(), &m.columns(half, first_half).into_owned()])
                    .expect("same rows");
            let b = hcat(
                m.nrows(),
                &[&m.columns(first_half, rest).into_owned(), &m.columns(half + first_half, rest).into_owned()],
            )
            .expect("same rows");
            (a, b)
        }
    }
}

/// Inverse of [`split_columns`]: canonical `[A, B]` from paired blocks.
pub(crate) fn join_columns(kind: SystemKind, rows: usize, blocks: &[&CMat]) -> Result<CMat> {
    match kind {
        SystemKind::Annihilation => hcat(rows, blocks),
        SystemKind::General => {
            let halves: Vec<usize> = blocks.iter().map(|b| b.ncols() / 2).collect();
            let paired = hcat(rows, blocks)?;
            let order = canonical_order(&halves);
            let all_rows: Vec<usize> = (0..rows).collect();
            Ok(permute(&paired, &all_rows, &order))
        }
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::dmat::{cx, from_real, max_diff};

    pub(crate) fn scalar(v: f64) -> CMat {
        from_real(1, 1, &[v])
    }

    /// Two-port cavity: f = -1, g_w = g_u = -1, h = 1, k = 1.
    pub(crate) fn cavity() -> PlantModel {
        PlantModel::new(SystemKind::Annihilation, scalar(-1.0), scalar(-1.0), scalar(-1.0), scalar(1.0), scalar(1.0))
            .unwrap()
    }

    pub(crate) fn cavity_with_cost() -> PlantModel {
        cavity().with_cost(CostOutput::new(scalar(1.0), scalar(0.0))).unwrap()
    }

    #[test]
    fn trivial_controller_keeps_plant_dynamics() {
        let p = cavity_with_cost();
        let cl = close_loop(&p, &ControllerModel::trivial(SystemKind::Annihilation, 1, 1)).unwrap();
        assert_eq!(cl.state_matrix(), &scalar(-1.0));
        assert_eq!(cl.system.b(), &from_real(1, 2, &[-1.0, -1.0]));
        assert!(cl.internally_stable);
    }

    #[test]
    fn static_feedback_shifts_pole() {
        let k = 0.7;
        let c = ControllerModel::static_gain(SystemKind::Annihilation, scalar(1.0), scalar(k)).unwrap();
        let cl = close_loop(&cavity(), &c).unwrap();
        assert!((cl.state_matrix()[(0, 0)] - cx(-1.0 - k, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn input_count_mismatch_is_dimension_error() {
        let c = ControllerModel::static_gain(SystemKind::Annihilation, eye(2), CMat::zeros(2, 1)).unwrap();
        assert!(matches!(close_loop(&cavity(), &c), Err(Error::Dimension(_))));
    }

    #[test]
    fn zero_controller_gives_plant_noise_channel() {
        let p = cavity().with_cost(CostOutput::new(scalar(1.0), scalar(0.0))).unwrap();
        let c = ControllerModel::static_gain(SystemKind::Annihilation, scalar(0.0), scalar(0.0)).unwrap();
        let g = gamma_cl(&p, &c).unwrap();
        let s = cx(0.2, 0.9);
        let v = tf_eval(&g, s).unwrap();
        let want = tf_eval(&p.cost_tf().unwrap(), s).unwrap()[(0, 0)];
        assert!((v[(0, 0)] - want).norm() < 1e-14);
        assert!(v[(0, 1)].norm() < 1e-14);
    }

    #[test]
    fn formula_matches_state_space_dynamic() {
        let p = cavity().with_cost(CostOutput::new(scalar(0.5), scalar(0.3))).unwrap();
        let c = ControllerModel::new(
            SystemKind::Annihilation,
            scalar(-2.0),
            from_real(1, 1, &[0.4]),
            scalar(0.7),
            scalar(1.1),
            scalar(0.5),
            scalar(0.2),
        )
        .unwrap();
        let cl = close_loop(&p, &c).unwrap();
        let s = cx(1.0, 1.0);
        let a = tf_eval(&cl.raw, s).unwrap();
        let b = gamma_cl_formula(&p, &c, s).unwrap();
        assert!(max_diff(&a, &b) < 1e-12);
    }

    #[test]
    fn selector_validation() {
        assert!(check_selector(&from_real(1, 2, &[1.0, 0.0])).is_ok());
        assert!(check_selector(&from_real(1, 2, &[0.5, 0.0])).is_err());
        assert!(check_selector(&from_real(2, 2, &[1.0, 0.0, 1.0, 0.0])).is_err());
    }

    #[test]
    fn split_and_join_are_inverse_for_general_blocks() {
        let m = CMat::from_fn(2, 6, |i, j| cx((i * 6 + j) as f64, 0.0));
        let (a, b) = split_columns(&m, SystemKind::General, 1);
        assert_eq!(a.ncols(), 2);
        assert_eq!(b.ncols(), 4);
        let back = join_columns(SystemKind::General, 2, &[&a, &b]).unwrap();
        assert_eq!(back, m);
    }
}
