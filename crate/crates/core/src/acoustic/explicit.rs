use super::{
    finish_lagrangian_update, star_states, AcousticContext, LagrangianStep, MassGeometry,
    RelaxationState, SourceTreatment, StarState,
};
use crate::error::{Error, Result};
use crate::mesh::FieldSet;

/// Explicit upwind update of the relaxation invariants, interior cells only.
/// Returns `(w→, w←)` over all cells; ghost entries are copied from the input.
pub fn explicit_w_update(
    relax: &RelaxationState,
    geom: &MassGeometry,
    stars: &[StarState],
    a: f64,
    dt: f64,
    ctx: &AcousticContext,
) -> (Vec<f64>, Vec<f64>) {
    let n_all = relax.w_fwd.len();
    let mut w_fwd = relax.w_fwd.clone();
    let mut w_bwd = relax.w_bwd.clone();
    let st = ctx.coeffs.st;
    let u_g = ctx.gas.u_g;
    for i in 1..n_all - 1 {
        let dm = geom.dm[i];
        let nu = a * dt / dm;
        w_fwd[i] = relax.w_fwd[i] - nu * (relax.w_fwd[i] - relax.w_fwd[i - 1]);
        w_bwd[i] = relax.w_bwd[i] + nu * (relax.w_bwd[i + 1] - relax.w_bwd[i]);
        if ctx.sources == SourceTreatment::Upwinded {
            w_fwd[i] += dt * a * geom.dm_half[i - 1] / dm * (u_g - stars[i - 1].u_star) / st;
            w_bwd[i] -= dt * a * geom.dm_half[i] / dm * (u_g - stars[i].u_star) / st;
        }
    }
    (w_fwd, w_bwd)
}

/// One explicit Lagrangian step `t^n → t^{n+1=}` with relaxation speed `a`.
///
/// Requires `a Δt / Δm_j ≤ 1/2` in every interior cell; otherwise the step is
/// rejected before any state is touched.
pub fn lagrangian_explicit_step(
    fields: &FieldSet,
    ctx: &AcousticContext,
    a: f64,
    dt: f64,
) -> Result<LagrangianStep> {
    let prims = fields.primitives_with_ghosts()?;
    let geom = MassGeometry::new(&prims, ctx.dx);
    let n_all = prims.len();

    let min_dm = geom.dm[1..n_all - 1]
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let admissible_dt = min_dm / (2.0 * a);
    if dt > admissible_dt {
        return Err(Error::StepRejected {
            constraint: "lagrangian CFL",
            dt,
            admissible_dt,
        });
    }

    let relax = RelaxationState::at_equilibrium(&prims, &ctx.coeffs, a);
    let stars = star_states(&relax.w_fwd, &relax.w_bwd, &geom, a, ctx);
    let (w_fwd, w_bwd) = explicit_w_update(&relax, &geom, &stars, a, dt, ctx);
    finish_lagrangian_update(&relax, &w_fwd, &w_bwd, &geom, stars, a, dt, ctx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::acoustic::{relaxation_speed, star_state_explicit, DEFAULT_SAFETY};
    use crate::mesh::BoundaryPolicy;
    use crate::model::{GasClosure, ModelCoefficients, PrimitiveState};
    use proptest::prelude::*;

    fn context(st: f64, tau_g: f64, u_g: f64, boundary: BoundaryPolicy, sources: SourceTreatment) -> AcousticContext {
        let gas = GasClosure::new(u_g, tau_g).unwrap();
        AcousticContext {
            gas,
            coeffs: ModelCoefficients::new(st, &gas).unwrap(),
            dx: 0.05,
            boundary,
            sources,
        }
    }

    fn max_rel_change(a: &FieldSet, b: &FieldSet) -> f64 {
        a.interior()
            .iter()
            .zip(b.interior())
            .flat_map(|(x, y)| {
                [
                    (x.rho - y.rho).abs() / x.rho.abs().max(1.0),
                    (x.mom - y.mom).abs() / x.mom.abs().max(1.0),
                    (x.etot - y.etot).abs() / x.etot.abs().max(1.0),
                ]
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn uniform_equilibrium_is_fixed() {
        for (st, u_g) in [(1.0, 0.0), (0.01, 0.3), (1e-4, -0.2)] {
            let ctx = context(st, 0.1, u_g, BoundaryPolicy::Transmissive, SourceTreatment::Upwinded);
            let eq = PrimitiveState::new(1.0, u_g, ctx.coeffs.equilibrium_internal_energy());
            let fields = FieldSet::uniform(12, eq, ctx.boundary);
            let a = relaxation_speed(&[eq], &ctx.coeffs, DEFAULT_SAFETY).unwrap().a;
            let dt = 0.4 * ctx.dx / a;
            let out = lagrangian_explicit_step(&fields, &ctx, a, dt).unwrap();
            assert!(max_rel_change(&fields, &out.fields) <= 1e-13, "st = {st}");
            assert!(out.stars.iter().all(|s| (s.u_star - u_g).abs() <= 1e-13));
        }
    }

    #[test]
    fn pressureless_rest_state_is_fixed() {
        let ctx = context(0.5, 0.0, 0.0, BoundaryPolicy::Transmissive, SourceTreatment::Upwinded);
        let prims: Vec<_> = (0..8)
            .map(|j| PrimitiveState::new(1.0 + 0.1 * j as f64, 0.0, 0.0))
            .collect();
        let fields = FieldSet::from_primitive(&prims, ctx.boundary);
        let out = lagrangian_explicit_step(&fields, &ctx, 1.0, 0.01).unwrap();
        assert_eq!(out.fields, fields);
    }

    #[test]
    fn cfl_violation_is_rejected() {
        let ctx = context(0.1, 0.1, 0.0, BoundaryPolicy::Transmissive, SourceTreatment::Upwinded);
        let fields = FieldSet::uniform(5, PrimitiveState::new(2.0, 0.0, 0.0), ctx.boundary);
        let a = 4.0;
        let err = lagrangian_explicit_step(&fields, &ctx, a, 1.0).unwrap_err();
        match err {
            Error::StepRejected { admissible_dt, .. } => {
                assert!((admissible_dt - 2.0 * ctx.dx / (2.0 * a)).abs() < 1e-15);
                assert!(lagrangian_explicit_step(&fields, &ctx, a, admissible_dt).is_ok());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn source_free_step_conserves_momentum_and_energy() {
        let ctx = context(0.3, 0.0, 0.0, BoundaryPolicy::Periodic, SourceTreatment::Omitted);
        let prims: Vec<_> = (0..16)
            .map(|j| {
                let x = j as f64 / 16.0;
                PrimitiveState::new(
                    1.0 + 0.5 * (6.0 * x).sin(),
                    0.3 * (4.0 * x).cos(),
                    0.2 + 0.1 * (2.0 * x).sin(),
                )
            })
            .collect();
        let fields = FieldSet::from_primitive(&prims, ctx.boundary);
        let a = relaxation_speed(&prims, &ctx.coeffs, 1.2).unwrap().a;
        let dt = 0.45 * 0.5 * ctx.dx / a;
        let out = lagrangian_explicit_step(&fields, &ctx, a, dt).unwrap();
        let new = out.fields.primitives().unwrap();
        // Δm_j is the Lagrangian mass of cell j, unchanged by the step
        let mom0: f64 = prims.iter().map(|p| p.u * p.rho * ctx.dx).sum();
        let mom1: f64 = new.iter().zip(&prims).map(|(q, p)| q.u * p.rho * ctx.dx).sum();
        let en0: f64 = prims.iter().map(|p| p.specific_energy() * p.rho * ctx.dx).sum();
        let en1: f64 = new.iter().zip(&prims).map(|(q, p)| q.specific_energy() * p.rho * ctx.dx).sum();
        assert!((mom1 - mom0).abs() <= 1e-14 * prims.len() as f64);
        assert!((en1 - en0).abs() <= 1e-13 * en0.abs());
    }

    #[test]
    fn tau_update_matches_star_differences() {
        let ctx = context(0.05, 0.1, 0.1, BoundaryPolicy::Transmissive, SourceTreatment::Upwinded);
        let mut prims = vec![PrimitiveState::new(1.0, 0.0, 0.0); 6];
        for p in prims.iter_mut().skip(3) {
            *p = PrimitiveState::new(1.8, -0.2, 0.05);
        }
        let fields = FieldSet::from_primitive(&prims, ctx.boundary);
        let a = relaxation_speed(&prims, &ctx.coeffs, DEFAULT_SAFETY).unwrap().a;
        let dt = 0.25 * ctx.dx / a;
        let out = lagrangian_explicit_step(&fields, &ctx, a, dt).unwrap();

        let all = fields.primitives_with_ghosts().unwrap();
        let c = &ctx.coeffs;
        let w = |p: &PrimitiveState, sign: f64| c.pressure(p.rho, p.eps) + sign * a * p.u;
        for j in 0..6 {
            let (l, m, r) = (&all[j], &all[j + 1], &all[j + 2]);
            let dm = m.rho * ctx.dx;
            let sl = star_state_explicit(w(l, 1.0), w(m, -1.0), a, c.st, 0.1, 0.5 * (l.rho + m.rho) * ctx.dx);
            let sr = star_state_explicit(w(m, 1.0), w(r, -1.0), a, c.st, 0.1, 0.5 * (m.rho + r.rho) * ctx.dx);
            let tau = 1.0 / m.rho + dt / dm * (sr.u_star - sl.u_star);
            let got = 1.0 / out.fields.interior()[j].rho;
            assert!((got - tau).abs() <= 1e-14 * tau, "cell {j}: {got} vs {tau}");
        }
    }

    proptest! {
        #[test]
        fn w_update_is_monotone(
            seed in proptest::collection::vec((0.5f64..2.0, -0.5f64..0.5, 0.0f64..0.2), 7),
            bump_cell in 0usize..9,
            bump in 1e-3f64..1.0,
            forward in proptest::bool::ANY,
            st in 1e-4f64..1.0,
        ) {
            let ctx = context(st, 0.1, 0.2, BoundaryPolicy::Transmissive, SourceTreatment::Upwinded);
            let prims: Vec<_> = seed.iter().map(|&(r, u, e)| PrimitiveState::new(r, u, e)).collect();
            let fields = FieldSet::from_primitive(&prims, ctx.boundary);
            let all = fields.primitives_with_ghosts().unwrap();
            let geom = MassGeometry::new(&all, ctx.dx);
            let a = relaxation_speed(&prims, &ctx.coeffs, DEFAULT_SAFETY).unwrap().a;
            let min_dm = geom.dm.iter().copied().fold(f64::INFINITY, f64::min);
            let dt = 0.5 * min_dm / a;

            let base = RelaxationState::at_equilibrium(&all, &ctx.coeffs, a);
            let mut bumped = base.clone();
            if forward { bumped.w_fwd[bump_cell] += bump } else { bumped.w_bwd[bump_cell] += bump }

            let run = |r: &RelaxationState| {
                let stars = star_states(&r.w_fwd, &r.w_bwd, &geom, a, &ctx);
                explicit_w_update(r, &geom, &stars, a, dt, &ctx)
            };
            let (f0, b0) = run(&base);
            let (f1, b1) = run(&bumped);
            for i in 1..f0.len() - 1 {
                let tol = 1e-12 * (f0[i].abs() + b0[i].abs() + 1.0);
                prop_assert!(f1[i] >= f0[i] - tol);
                prop_assert!(b1[i] >= b0[i] - tol);
            }
        }
    }
}
