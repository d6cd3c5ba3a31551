//! Modified forms: static controller feedthrough folded into the plant,
//! leaving a strictly proper controller.

use super::{check_loop_dims, finish_loop, join_columns, ClosedLoop, ControllerModel, CostOutput, PlantModel, RawLoop};
use crate::dmat::{block2, canonical_order, hcat, permute, vcat, CMat};
use crate::error::{Error, Result};
use crate::qsys::SystemKind;

/// Modified plant (noise `[W; W̃]`) and strictly proper controller. The two
/// share the W̃ channel, so they must be closed with
/// [`ModifiedPair::close_loop`] rather than the generic composition.
#[derive(Debug, Clone)]
pub struct ModifiedPair {
    pub plant: PlantModel,
    pub controller: ControllerModel,
    /// Original plant noise count (halves for general systems).
    pub m_w: usize,
    pub m_wt: usize,
}

/// `F ← F + G_u K_cy H`, noise `[G_w + G_u K_cy K, G_u K_cw]`, cost
/// `C ← C + D K_cy H`, `E ← [E + D K_cy K, D K_cw]`; controller loses its
/// feedthrough.
pub fn modified_forms(p: &PlantModel, c: &ControllerModel) -> Result<ModifiedPair> {
    check_loop_dims(p, c)?;
    let (pd, cd) = (p.dims(), c.dims());
    if cd.m_wt < pd.m_u {
        return Err(Error::dim(format!(
            "controller noise dimension {} is smaller than the plant input dimension {}",
            cd.m_wt, pd.m_u
        )));
    }
    let kind = p.kind;
    let s = p.f.nrows();
    let f = &p.f + &p.g_u * &c.k_cy * &p.h;
    let gw_a = &p.g_w + &p.g_u * &c.k_cy * &p.k;
    let gw_b = &p.g_u * &c.k_cw;
    let g_w = join_columns(kind, s, &[&gw_a, &gw_b])?;
    let k = join_columns(kind, p.h.nrows(), &[&p.k, &CMat::zeros(p.h.nrows(), c.g_cw.ncols())])?;
    let mut plant = PlantModel::new(kind, f, g_w, p.g_u.clone(), p.h.clone(), k)?;
    if let Some(cost) = &p.cost {
        let e = cost.e_or_zero(p.g_w.ncols());
        let c_new = &cost.c + &cost.d * &c.k_cy * &p.h;
        let e_new = join_columns(kind, cost.rows(), &[&(e + &cost.d * &c.k_cy * &p.k), &(&cost.d * &c.k_cw)])?;
        plant = plant.with_cost(CostOutput { c: c_new, d: cost.d.clone(), e: Some(e_new) })?;
    }
    let controller = ControllerModel::new(
        kind,
        c.f_c.clone(),
        c.g_cw.clone(),
        c.g_cy.clone(),
        c.h_c.clone(),
        CMat::zeros(c.k_cw.nrows(), c.k_cw.ncols()),
        CMat::zeros(c.k_cy.nrows(), c.k_cy.ncols()),
    )?;
    Ok(ModifiedPair { plant, controller, m_w: pd.m_w, m_wt: cd.m_wt })
}

impl ModifiedPair {
    /// Closes the modified loop with W̃ shared between plant and controller.
    pub fn close_loop(&self) -> Result<ClosedLoop> {
        let (p, c) = (&self.plant, &self.controller);
        let kind = p.kind;
        let nc = c.f_c.nrows();
        let a = block2(&p.f, &(&p.g_u * &c.h_c), &(&c.g_cy * &p.h), &c.f_c)?;
        let w = kind.width();
        let cw_embedded = join_columns(kind, nc, &[&CMat::zeros(nc, w * self.m_w), &c.g_cw])?;
        let b = vcat(p.g_w.ncols(), &[&p.g_w, &(&c.g_cy * &p.k + cw_embedded)])?;
        let (cm, dm) = match &p.cost {
            Some(cost) => (hcat(cost.rows(), &[&cost.c, &(&cost.d * &c.h_c)])?, cost.e_or_zero(p.g_w.ncols())),
            None => (CMat::zeros(0, a.ncols()), CMat::zeros(0, b.ncols())),
        };
        // Inputs here are already canonical; finish_loop expects paired.
        let b = match kind {
            SystemKind::Annihilation => b,
            SystemKind::General => {
                let order = canonical_order(&[self.m_w, self.m_wt]);
                let mut inv = vec![0; order.len()];
                for (k, &src) in order.iter().enumerate() {
                    inv[src] = k;
                }
                let rows: Vec<usize> = (0..b.nrows()).collect();
                let out_rows: Vec<usize> = (0..dm.nrows()).collect();
                let b_paired = permute(&b, &rows, &inv);
                let d_paired = permute(&dm, &out_rows, &inv);
                return finish_loop(
                    kind,
                    p.dims().n,
                    c.dims().n_c,
                    self.m_w,
                    self.m_wt,
                    RawLoop { a, b: b_paired, c: cm, d: d_paired },
                );
            }
        };
        finish_loop(kind, p.dims().n, c.dims().n_c, self.m_w, self.m_wt, RawLoop { a, b, c: cm, d: dm })
    }
}

#[cfg(test)]
mod tests {
    use super::super::close_loop;
    use super::super::tests::{cavity, cavity_with_cost, scalar};
    use super::*;
    use crate::dmat::{cx, max_diff};
    use crate::xfer::tf_eval;

    #[test]
    fn trivial_feedthrough_adds_g_u_columns() {
        let m = modified_forms(&cavity(), &ControllerModel::trivial(SystemKind::Annihilation, 1, 1)).unwrap();
        assert_eq!(m.plant.g_w, crate::dmat::from_real(1, 2, &[-1.0, -1.0]));
    }

    #[test]
    fn negative_static_feedback_zeroes_the_pole() {
        let c = ControllerModel::static_gain(SystemKind::Annihilation, scalar(1.0), scalar(-1.0)).unwrap();
        let m = modified_forms(&cavity(), &c).unwrap();
        assert!(m.plant.f[(0, 0)].norm() < 1e-15);
        assert!(!m.close_loop().unwrap().internally_stable);
    }

    #[test]
    fn modified_loop_matches_original() {
        let p = cavity_with_cost();
        let c = ControllerModel::new(
            SystemKind::Annihilation,
            scalar(-3.0),
            crate::dmat::from_real(1, 2, &[0.4, -0.2]),
            scalar(0.7),
            scalar(1.1),
            crate::dmat::from_real(1, 2, &[1.0, 0.0]),
            scalar(0.3),
        )
        .unwrap();
        let orig = close_loop(&p, &c).unwrap();
        let modi = modified_forms(&p, &c).unwrap().close_loop().unwrap();
        assert_eq!(orig.state_matrix(), modi.state_matrix());
        for k in 0..20 {
            let s = cx(0.0, -5.0 + 0.5 * k as f64);
            let a = tf_eval(&orig.system, s).unwrap();
            let b = tf_eval(&modi.system, s).unwrap();
            assert!(max_diff(&a, &b) < 1e-12);
        }
    }

    #[test]
    fn too_few_controller_noises_is_rejected() {
        let c = ControllerModel::static_gain(SystemKind::Annihilation, CMat::zeros(1, 0), scalar(0.0)).unwrap();
        assert!(matches!(modified_forms(&cavity(), &c), Err(Error::Dimension(_))));
    }
}
