use proptest::prelude::*;

use floquet_tunnel::analytic::{xi, xi0_closed_form, AiryRegimeParams};
use floquet_tunnel::barrier::BarrierModel;
use floquet_tunnel::floquet::{assemble, flux_balance, solve, SolverOptions};
use floquet_tunnel::linalg::dense_solve;
use floquet_tunnel::model::{BarrierSpec, DriveSpec, IncidentSpec, SidebandGrid};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn tridiagonal_matches_dense_lu(
        v in 0.5f64..2.0,
        l in 0.5f64..12.0,
        beta in 0.0f64..3.0,
        omega in 0.001f64..0.2,
        om in 0.05f64..1.5,
        lo in 0i64..=100,
        hi in 0i64..=100,
    ) {
        let b = BarrierSpec::new(v, l).unwrap();
        let d = DriveSpec::new(beta, omega, 0.0).unwrap();
        let inc = IncidentSpec::new(om).unwrap();
        let grid = SidebandGrid::new(-lo, hi).unwrap();
        let channels: Vec<_> = grid
            .indices()
            .zip(grid.energies(&inc, &d))
            .map(|(n, e)| b.channel(n, e))
            .collect();
        let sys = assemble(grid, &channels, &d);
        let fast = sys.matrix.solve(&sys.rhs).unwrap();
        let dense = dense_solve(&sys.matrix.to_dense(), &sys.rhs).unwrap();
        let scale = dense.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let gap = fast.iter().zip(&dense).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(gap <= 1e-10 * scale, "gap {gap:e}, scale {scale:e}");
    }

    #[test]
    fn xi0_matches_closed_form(
        v in 0.5f64..2.0,
        beta in 0.05f64..4.0,
        omega in 1e-4f64..0.5,
        frac in 0.01f64..0.99,
    ) {
        let b = BarrierSpec::new(v, 5.0).unwrap();
        let d = DriveSpec::new(beta, omega, 0.0).unwrap();
        let p = AiryRegimeParams::new(&b, &d, &IncidentSpec::new(frac * v).unwrap()).unwrap();
        let closed = xi0_closed_form(p.rho, beta, omega);
        let size = (beta * p.rho / (omega * 2f64.sqrt())).powf(2.0 / 3.0);
        prop_assert!((xi(0.0, &p) - closed).abs() <= 1e-12 * size);
    }

    #[test]
    fn converged_solves_conserve_flux(
        l in 2.0f64..12.0,
        beta in 0.0f64..2.0,
        omega in 0.01f64..0.1,
        eta in 0.0f64..std::f64::consts::TAU,
        om in 0.1f64..0.95,
    ) {
        let b = BarrierSpec::new(1.0, l).unwrap();
        let d = DriveSpec::new(beta, omega, eta).unwrap();
        let sol = solve(&b, &d, &IncidentSpec::new(om).unwrap(), &SolverOptions::default()).unwrap();
        prop_assert!(sol.converged);
        prop_assert!(flux_balance(&sol) <= 1e-8);
    }
}
