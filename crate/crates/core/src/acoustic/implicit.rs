use super::{
    finish_lagrangian_update, solve_banded, star_states, AcousticContext, BandedMatrix,
    LagrangianStep, MassGeometry, PentadiagonalSystem, RelaxationState, SourceTreatment,
};
use crate::error::{Error, Result};
use crate::mesh::{fill_ghosts, BoundaryPolicy, FieldSet};

/// Linear system for the implicit invariants, unknowns interleaved as
/// `(w→_0, w←_0, w→_1, w←_1, …)`.
///
/// Eliminating `u*` from the implicit `w` updates leaves, with
/// `ν_j = a Δt/Δm_j` and `θ_{j+1/2} = Δm_{j+1/2}/(2 a St + Δm_{j+1/2})`,
///
/// ```text
/// (1+ν_j) w→_j - ν_j (1-θ_{j-1/2}) w→_{j-1} - ν_j θ_{j-1/2} w←_j = w→_j^n + 2a ν_j θ_{j-1/2} ū_g
/// (1+ν_j) w←_j - ν_j (1-θ_{j+1/2}) w←_{j+1} - ν_j θ_{j+1/2} w→_j = w←_j^n - 2a ν_j θ_{j+1/2} ū_g
/// ```
///
/// Every row is strictly dominant since the off-diagonal weights sum to `ν_j`.
/// Transmissive ghosts contribute their `t^n` invariants to the right-hand
/// side; periodic neighbours become the two corner entries.
pub fn assemble_implicit_system(
    fields: &FieldSet,
    ctx: &AcousticContext,
    a: f64,
    dt: f64,
) -> Result<PentadiagonalSystem> {
    let prims = fields.primitives_with_ghosts()?;
    let geom = MassGeometry::new(&prims, ctx.dx);
    let relax = RelaxationState::at_equilibrium(&prims, &ctx.coeffs, a);
    Ok(assemble(&relax, &geom, a, dt, ctx))
}

fn assemble(
    relax: &RelaxationState,
    geom: &MassGeometry,
    a: f64,
    dt: f64,
    ctx: &AcousticContext,
) -> PentadiagonalSystem {
    let n = relax.tau.len() - 2;
    let theta = |k: usize| match ctx.sources {
        SourceTreatment::Upwinded => {
            geom.dm_half[k] / (2.0 * a * ctx.coeffs.st + geom.dm_half[k])
        }
        SourceTreatment::Omitted => 0.0,
    };
    let u_g = match ctx.sources {
        SourceTreatment::Upwinded => ctx.gas.u_g,
        SourceTreatment::Omitted => 0.0,
    };

    let mut matrix = BandedMatrix::zeros(2 * n, 2, 2);
    let mut rhs = vec![0.0; 2 * n];
    let mut corners = Vec::new();
    for j in 0..n {
        let i = j + 1;
        let nu = a * dt / geom.dm[i];
        let (th_l, th_r) = (theta(i - 1), theta(i));
        let (rf, rb) = (2 * j, 2 * j + 1);

        matrix.set(rf, rf, 1.0 + nu);
        matrix.set(rf, rb, -nu * th_l);
        rhs[rf] = relax.w_fwd[i] + 2.0 * a * nu * th_l * u_g;
        let upstream = -nu * (1.0 - th_l);
        if j > 0 {
            matrix.set(rf, rf - 2, upstream);
        } else {
            match ctx.boundary {
                BoundaryPolicy::Transmissive => rhs[rf] -= upstream * relax.w_fwd[0],
                BoundaryPolicy::Periodic => corners.push((rf, 2 * (n - 1), upstream)),
            }
        }

        matrix.set(rb, rb, 1.0 + nu);
        matrix.set(rb, rf, -nu * th_r);
        rhs[rb] = relax.w_bwd[i] - 2.0 * a * nu * th_r * u_g;
        let upstream = -nu * (1.0 - th_r);
        if j + 1 < n {
            matrix.set(rb, rb + 2, upstream);
        } else {
            match ctx.boundary {
                BoundaryPolicy::Transmissive => rhs[rb] -= upstream * relax.w_bwd[n + 1],
                BoundaryPolicy::Periodic => corners.push((rb, 1, upstream)),
            }
        }
    }
    PentadiagonalSystem {
        matrix,
        corners,
        rhs,
    }
}

/// One implicit Lagrangian step: implicit invariants from the banded solve,
/// star states from the new invariants, then explicit `τ` and `E` updates.
/// No acoustic time-step restriction; `a` is lagged at `t^n`.
pub fn lagrangian_implicit_step(
    fields: &FieldSet,
    ctx: &AcousticContext,
    a: f64,
    dt: f64,
) -> Result<LagrangianStep> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "dt",
            reason: format!("expected a finite positive time step, got {dt}"),
        });
    }
    let prims = fields.primitives_with_ghosts()?;
    let geom = MassGeometry::new(&prims, ctx.dx);
    let relax = RelaxationState::at_equilibrium(&prims, &ctx.coeffs, a);
    let system = assemble(&relax, &geom, a, dt, ctx);
    let solution = solve_banded(&system)?;

    let n_all = prims.len();
    let mut w_fwd = relax.w_fwd.clone();
    let mut w_bwd = relax.w_bwd.clone();
    for j in 0..n_all - 2 {
        w_fwd[j + 1] = solution[2 * j];
        w_bwd[j + 1] = solution[2 * j + 1];
    }
    if ctx.boundary == BoundaryPolicy::Periodic {
        fill_ghosts(&mut w_fwd, ctx.boundary);
        fill_ghosts(&mut w_bwd, ctx.boundary);
    }
    let stars = star_states(&w_fwd, &w_bwd, &geom, a, ctx);
    finish_lagrangian_update(&relax, &w_fwd, &w_bwd, &geom, stars, a, dt, ctx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::acoustic::{lagrangian_explicit_step, relaxation_speed, DEFAULT_SAFETY};
    use crate::model::{GasClosure, ModelCoefficients, PrimitiveState};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn context(st: f64, u_g: f64, boundary: BoundaryPolicy, sources: SourceTreatment) -> AcousticContext {
        let gas = GasClosure::new(u_g, 0.1).unwrap();
        AcousticContext {
            gas,
            coeffs: ModelCoefficients::new(st, &gas).unwrap(),
            dx: 0.02,
            boundary,
            sources,
        }
    }

    fn random_prims(rng: &mut ChaCha8Rng, n: usize) -> Vec<PrimitiveState> {
        (0..n)
            .map(|_| {
                PrimitiveState::new(
                    rng.gen_range(0.5..2.0),
                    rng.gen_range(-0.5..0.5),
                    rng.gen_range(0.0..0.2),
                )
            })
            .collect()
    }

    #[test]
    fn zero_time_step_gives_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ctx = context(0.01, 0.2, BoundaryPolicy::Transmissive, SourceTreatment::Upwinded);
        let prims = random_prims(&mut rng, 9);
        let fields = FieldSet::from_primitive(&prims, ctx.boundary);
        let a = relaxation_speed(&prims, &ctx.coeffs, DEFAULT_SAFETY).unwrap().a;
        let sys = assemble_implicit_system(&fields, &ctx, a, 1e-16).unwrap();
        let x = solve_banded(&sys).unwrap();
        let relax = RelaxationState::at_equilibrium(&fields.primitives_with_ghosts().unwrap(), &ctx.coeffs, a);
        for j in 0..9 {
            assert!((x[2 * j] - relax.w_fwd[j + 1]).abs() <= 1e-10 * relax.w_fwd[j + 1].abs().max(1.0));
            assert!((x[2 * j + 1] - relax.w_bwd[j + 1]).abs() <= 1e-10 * relax.w_bwd[j + 1].abs().max(1.0));
        }
    }

    #[test]
    fn periodic_uniform_equilibrium_is_fixed() {
        let ctx = context(0.01, 0.3, BoundaryPolicy::Periodic, SourceTreatment::Upwinded);
        let eq = PrimitiveState::new(1.0, 0.3, ctx.coeffs.equilibrium_internal_energy());
        let fields = FieldSet::uniform(3, eq, ctx.boundary);
        let a = relaxation_speed(&[eq], &ctx.coeffs, DEFAULT_SAFETY).unwrap().a;
        let sys = assemble_implicit_system(&fields, &ctx, a, 0.7).unwrap();
        assert_eq!(sys.corners.len(), 2);
        let x = solve_banded(&sys).unwrap();
        let p = ctx.coeffs.pressure(eq.rho, eq.eps);
        for j in 0..3 {
            assert!((x[2 * j] - (p + a * eq.u)).abs() <= 1e-12 * p);
            assert!((x[2 * j + 1] - (p - a * eq.u)).abs() <= 1e-12 * p);
        }
        for dt in [1e-3, 0.1, 10.0] {
            let out = lagrangian_implicit_step(&fields, &ctx, a, dt).unwrap();
            for (c0, c1) in fields.interior().iter().zip(out.fields.interior()) {
                assert!((c0.rho - c1.rho).abs() <= 1e-12);
                assert!((c0.mom - c1.mom).abs() <= 1e-12);
                assert!((c0.etot - c1.etot).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn assembled_matrix_is_dominant() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for boundary in [BoundaryPolicy::Transmissive, BoundaryPolicy::Periodic] {
            for sources in [SourceTreatment::Upwinded, SourceTreatment::Omitted] {
                let ctx = context(1e-3, 0.1, boundary, sources);
                let prims = random_prims(&mut rng, 5);
                let fields = FieldSet::from_primitive(&prims, boundary);
                let a = relaxation_speed(&prims, &ctx.coeffs, DEFAULT_SAFETY).unwrap().a;
                let sys = assemble_implicit_system(&fields, &ctx, a, 0.3).unwrap();
                for i in 0..sys.matrix.dim() {
                    let mut off = sys.matrix.off_diagonal_sum(i);
                    off += sys.corners.iter().filter(|c| c.0 == i).map(|c| c.2.abs()).sum::<f64>();
                    assert!(sys.matrix.get(i, i).abs() > off, "row {i}");
                }
            }
        }
    }

    #[test]
    fn implicit_and_explicit_agree_at_explicit_dt() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let ctx = context(0.01, 0.0, BoundaryPolicy::Transmissive, SourceTreatment::Upwinded);
        let prims = random_prims(&mut rng, 10);
        let fields = FieldSet::from_primitive(&prims, ctx.boundary);
        let a = relaxation_speed(&prims, &ctx.coeffs, DEFAULT_SAFETY).unwrap().a;
        let dt = 0.5 * 0.5 * ctx.dx / a;
        let ex = lagrangian_explicit_step(&fields, &ctx, a, dt).unwrap();
        let im = lagrangian_implicit_step(&fields, &ctx, a, dt).unwrap();
        let gap = ex
            .fields
            .interior()
            .iter()
            .zip(im.fields.interior())
            .map(|(x, y)| (x.rho - y.rho).abs() / x.rho)
            .fold(0.0, f64::max);
        assert!(gap > 0.0 && gap <= 10.0 * dt, "gap {gap}, dt {dt}");
    }

    #[test]
    fn rejects_bad_time_step() {
        let ctx = context(0.01, 0.0, BoundaryPolicy::Transmissive, SourceTreatment::Upwinded);
        let fields = FieldSet::uniform(4, PrimitiveState::new(1.0, 0.0, 0.0), ctx.boundary);
        assert!(lagrangian_implicit_step(&fields, &ctx, 1.0, 0.0).is_err());
        assert!(lagrangian_implicit_step(&fields, &ctx, 1.0, f64::NAN).is_err());
    }
}
