use decide_qsl::bath::{discretize_debye, discretize_ohmic, sample_wigner, SpectralDensity};
use decide_qsl::bre::{compute_kernels, m_bre_propagate, nm_bre_propagate, spin_up, KernelTable};
use decide_qsl::dynamics::{
    build_fmo_hamiltonian, propagate_trajectory, run_ensemble, EnergyOffset, EnsembleOptions, Fmo, ModelEom,
    ReducedSeries, SpinBoson, FMO_TABLE_CM,
};
use decide_qsl::numerics::{
    hermitian_eigenvalues, rk4_step, schatten_norm, simpson_integrate, CMatrix, GaussianStreams, SchattenP, TimeGrid,
};
use decide_qsl::qsl::{qsl_report, qsl_tau2, qsl_tau2_bloch};
use decide_qsl::units::wavenumber_to_angular;
use decide_qsl::C;
use proptest::prelude::*;

fn hermitian(dim: usize, entries: &[(f64, f64)]) -> CMatrix<f64> {
    let mut k = 0;
    let mut upper = vec![C::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        for j in i..dim {
            let (re, im) = entries[k];
            k += 1;
            upper[i * dim + j] = if i == j { C::new(re, 0.0) } else { C::new(re, im) };
        }
    }
    CMatrix::from_fn(dim, |i, j| if i <= j { upper[i * dim + j] } else { upper[j * dim + i].conj() })
}

fn general(dim: usize, entries: &[(f64, f64)]) -> CMatrix<f64> {
    CMatrix::from_fn(dim, |i, j| {
        let (re, im) = entries[i * dim + j];
        C::new(re, im)
    })
}

fn entries(n: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-3.0..3.0f64, -3.0..3.0f64), n)
}

/// Coefficients `c_0..c_n` of `det(x I - A)` (monic, `c_n = 1`) by the
/// Faddeev-LeVerrier recursion.
fn char_poly(a: &CMatrix<f64>) -> Vec<C<f64>> {
    let n = a.dim();
    let mut coeffs = vec![C::new(0.0, 0.0); n + 1];
    coeffs[n] = C::new(1.0, 0.0);
    let mut m = CMatrix::zeros(n);
    for k in 1..=n {
        let prev = coeffs[n - k + 1];
        let shifted = CMatrix::from_fn(n, |i, j| m[(i, j)] + if i == j { prev } else { C::new(0.0, 0.0) });
        m = a.matmul(&shifted);
        coeffs[n - k] = -m.trace() / k as f64;
    }
    coeffs
}

/// All roots of a monic polynomial by Durand-Kerner iteration.
fn poly_roots(coeffs: &[C<f64>]) -> Vec<C<f64>> {
    let n = coeffs.len() - 1;
    let eval = |x: C<f64>| coeffs.iter().rev().fold(C::new(0.0, 0.0), |acc, &c| acc * x + c);
    let radius = 1.0 + coeffs[..n].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut roots: Vec<C<f64>> = (0..n)
        .map(|k| C::from_polar(radius, 0.4 + 2.0 * std::f64::consts::PI * k as f64 / n as f64))
        .collect();
    for _ in 0..2000 {
        let mut change: f64 = 0.0;
        for i in 0..n {
            let denom = (0..n).filter(|&j| j != i).fold(C::new(1.0, 0.0), |acc, j| acc * (roots[i] - roots[j]));
            let delta = eval(roots[i]) / denom;
            roots[i] -= delta;
            change = change.max(delta.norm());
        }
        if change < 1e-14 {
            break;
        }
    }
    // polish each root with Newton steps on the polynomial
    let deriv: Vec<C<f64>> = (1..=n).map(|k| coeffs[k] * k as f64).collect();
    let eval_d = |x: C<f64>| deriv.iter().rev().fold(C::new(0.0, 0.0), |acc, &c| acc * x + c);
    for r in roots.iter_mut() {
        for _ in 0..3 {
            let d = eval_d(*r);
            if d.norm() > 0.0 {
                *r -= eval(*r) / d;
            }
        }
    }
    roots
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn schatten_norms_are_ordered(dim in 2usize..=7, e in entries(49)) {
        let a = general(dim, &e);
        let n1 = schatten_norm(&a, SchattenP::One);
        let n2 = schatten_norm(&a, SchattenP::Two);
        let ninf = schatten_norm(&a, SchattenP::Infinity);
        let tol = 1e-9 * n1.max(1.0);
        prop_assert!(n1 + tol >= n2 && n2 + tol >= ninf, "{n1} {n2} {ninf}");
        prop_assert!((n2 - a.frobenius_norm()).abs() < 1e-9 * n2.max(1.0));
    }

    #[test]
    fn eigenvalues_sum_to_trace(dim in 1usize..=8, e in entries(36)) {
        let a = hermitian(dim, &e);
        let ev = hermitian_eigenvalues(&a).unwrap();
        let sum: f64 = ev.iter().sum();
        prop_assert!((sum - a.trace().re).abs() < 1e-10);
        prop_assert!(ev.windows(2).all(|w| w[0] <= w[1]));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn jacobi_matches_characteristic_polynomial(e in entries(28)) {
        let a = hermitian(7, &e);
        let ev = hermitian_eigenvalues(&a).unwrap();
        let mut roots: Vec<f64> = poly_roots(&char_poly(&a)).iter().map(|r| r.re).collect();
        roots.sort_by(f64::total_cmp);
        for (x, r) in ev.iter().zip(&roots) {
            prop_assert!((x - r).abs() < 1e-6, "{ev:?} vs {roots:?}");
        }
    }

    #[test]
    fn simpson_is_exact_for_cubics(
        c in prop::array::uniform4(-5.0..5.0f64),
        half_intervals in 1usize..40,
        length in 0.1..10.0f64,
    ) {
        let n = 2 * half_intervals;
        let dt = length / n as f64;
        let f = |x: f64| c[0] + c[1] * x + c[2] * x * x + c[3] * x * x * x;
        let samples: Vec<f64> = (0..=n).map(|k| f(k as f64 * dt)).collect();
        let l = length;
        let exact = c[0] * l + c[1] * l * l / 2.0 + c[2] * l.powi(3) / 3.0 + c[3] * l.powi(4) / 4.0;
        let got = simpson_integrate(&samples, dt).unwrap();
        prop_assert!((got - exact).abs() < 1e-10 * exact.abs().max(1.0) * (1.0 + l.powi(4)));
    }

    #[test]
    fn qsl_family_is_ordered_on_random_series(
        levels in 2usize..=4,
        n_steps in 2usize..12,
        data in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 12 * 16 * 2),
        fidelity in 0.0..1.0f64,
    ) {
        let grid = TimeGrid::new(0.0, 0.1, n_steps).unwrap();
        let block = levels * levels;
        let mut density = Vec::new();
        let mut rate = Vec::new();
        for k in 0..grid.n_points() {
            let d = hermitian(levels, &data[2 * k * 10..]);
            let r = hermitian(levels, &data[(2 * k + 1) * 10..]);
            for i in 0..levels {
                for j in 0..levels {
                    density.push(d[(i, j)]);
                    rate.push(r[(i, j)]);
                }
            }
        }
        let last = grid.n_steps * block;
        density[last] = C::new(fidelity, 0.0);
        let series = ReducedSeries::exact(grid, levels, 0, density, rate).unwrap();
        let r = qsl_report(&series, grid.t_end()).unwrap();
        let tol = 1e-12 * r.tau_inf().abs().max(1.0);
        prop_assert!(r.tau1() <= r.tau2() + tol && r.tau2() <= r.tau_inf() + tol, "{:?}", r.tau_p);
    }

    #[test]
    fn two_level_operator_norm_identity(
        bloch in prop::collection::vec(prop::array::uniform3(-1.0..1.0f64), 9),
        rates in prop::collection::vec(prop::array::uniform3(-1.0..1.0f64), 9),
    ) {
        let grid = TimeGrid::new(0.0, 0.125, 8).unwrap();
        let mut b = bloch.clone();
        b[8][2] = b[8][2].min(0.99);
        let series = ReducedSeries::from_bloch(grid, &b, &rates).unwrap();
        let r = qsl_report(&series, 1.0).unwrap();
        prop_assert!((r.tau_inf() - 2f64.sqrt() * r.tau2()).abs() < 1e-12 * r.tau_inf().abs().max(1.0));
        prop_assert!((r.tau1() - r.tau2() / 2f64.sqrt()).abs() < 1e-12 * r.tau2().abs().max(1.0));
        let via_bloch = qsl_tau2_bloch(&series, 1.0).unwrap();
        prop_assert!((via_bloch - r.tau2()).abs() < 1e-10 * r.tau2().abs().max(1e-300));
    }
}

#[test]
fn rk4_converges_at_fourth_order() {
    // y' = y cos t, y(0) = 1
    let exact = |t: f64| t.sin().exp();
    let error = |n: usize| {
        let dt = 2.0 / n as f64;
        let mut y = vec![1.0f64];
        for k in 0..n {
            y = rk4_step(|t: f64, y: &[f64], dy: &mut [f64]| dy[0] = y[0] * t.cos(), &y, k as f64 * dt, dt).unwrap();
        }
        (y[0] - exact(2.0)).abs()
    };
    let (coarse, fine) = (error(20), error(40));
    let order = (coarse / fine).log2();
    assert!(order >= 3.9, "measured order {order}");
}

#[test]
fn wigner_moments() {
    let bath = discretize_ohmic(0.5, 1.0, 5.0, 3).unwrap().with_temperature(1.0).unwrap();
    let n = 100_000;
    let mut sums = vec![[0.0f64; 5]; 3];
    for i in 0..n {
        let mut streams = GaussianStreams::new(11, i);
        let s = sample_wigner(&bath, &mut streams, 0);
        for j in 0..3 {
            let (r, p) = (s.positions[j], s.momenta[j]);
            let acc = &mut sums[j];
            acc[0] += r;
            acc[1] += p;
            acc[2] += r * r;
            acc[3] += p * p;
            acc[4] += r * p;
        }
    }
    let nf = n as f64;
    for (j, acc) in sums.iter().enumerate() {
        let (var_r, var_p) = bath.wigner_variances(j);
        // 5 sigma bounds for Gaussian sample moments
        assert!((acc[0] / nf).abs() < 5.0 * (var_r / nf).sqrt());
        assert!((acc[1] / nf).abs() < 5.0 * (var_p / nf).sqrt());
        assert!((acc[2] / nf / var_r - 1.0).abs() < 5.0 * (2.0 / nf).sqrt());
        assert!((acc[3] / nf / var_p - 1.0).abs() < 5.0 * (2.0 / nf).sqrt());
        assert!((acc[4] / nf).abs() < 5.0 * (var_r * var_p / nf).sqrt());
    }
}

#[test]
fn ensemble_is_bitwise_reproducible_across_worker_counts() {
    let bath = discretize_ohmic(0.5, 1.0, 5.0, 20).unwrap().with_temperature(1.0).unwrap();
    let model = SpinBoson::new(0.2, bath).unwrap();
    let grid = TimeGrid::spanning(0.01, 0.5).unwrap();
    let run = |workers| {
        let options = EnsembleOptions {
            n_traj: 100,
            master_seed: 42,
            deterministic: true,
            workers,
        };
        run_ensemble(&model, &grid, &options).unwrap()
    };
    let reference = run(Some(1));
    for workers in [Some(1), Some(2), Some(3), None] {
        let other = run(workers);
        let same = |a: &[C<f64>], b: &[C<f64>]| {
            a.iter().zip(b).all(|(x, y)| x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits())
        };
        assert!(same(&reference.density, &other.density) && same(&reference.rate, &other.rate));
        assert_eq!(reference.batches, other.batches);
    }
    let reseeded = run_ensemble(
        &model,
        &grid,
        &EnsembleOptions {
            n_traj: 100,
            master_seed: 43,
            deterministic: true,
            workers: Some(1),
        },
    )
    .unwrap();
    assert_ne!(reference.density, reseeded.density);
}

#[test]
fn fast_mode_agrees_to_rounding() {
    let bath = discretize_ohmic(0.5, 1.0, 5.0, 20).unwrap().with_temperature(1.0).unwrap();
    let model = SpinBoson::new(0.2, bath).unwrap();
    let grid = TimeGrid::spanning(0.01, 0.5).unwrap();
    let mut options = EnsembleOptions {
        n_traj: 64,
        master_seed: 5,
        deterministic: true,
        workers: Some(2),
    };
    let a = run_ensemble(&model, &grid, &options).unwrap();
    options.deterministic = false;
    let b = run_ensemble(&model, &grid, &options).unwrap();
    for (x, y) in a.density.iter().zip(&b.density) {
        assert!((x - y).norm() < 1e-13);
    }
}

#[test]
fn fmo_trajectory_is_invariant_under_energy_shift() {
    let lambda = wavenumber_to_angular(35.0);
    let baths: Vec<_> = (0..7)
        .map(|_| discretize_debye(lambda, 50.0, 0.2, 5).unwrap().with_temperature(0.0393).unwrap())
        .collect();
    let table: Vec<Vec<f64>> = FMO_TABLE_CM
        .iter()
        .map(|r| r.iter().map(|&x| wavenumber_to_angular(x)).collect())
        .collect();
    let grid = TimeGrid::spanning(1.0, 200.0).unwrap();
    let record = |offset| {
        let h = build_fmo_hamiltonian(&table, &baths, offset).unwrap();
        let model = Fmo::new(h, baths.clone(), 0).unwrap();
        let mut streams = GaussianStreams::new(9, 0);
        let sample = model.sample_bath(&mut streams);
        propagate_trajectory(&model, &sample, &grid).unwrap()
    };
    let shifted = record(EnergyOffset::MinSiteEnergy);
    let absolute = record(EnergyOffset::None);
    let worst = shifted
        .density
        .iter()
        .zip(&absolute.density)
        .chain(shifted.density_rate.iter().zip(&absolute.density_rate))
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    assert!(worst < 1e-10, "max deviation {worst:e}");
}

#[test]
fn deterministic_series_respect_the_bound() {
    for (xi, temperature) in [(0.001, 1.0), (0.1, 2.0), (1.0, 1.0)] {
        let j = SpectralDensity::OhmicExponential { xi, omega_c: 1.0 };
        let grid = TimeGrid::spanning(0.01, 10.0).unwrap();
        let kernels = compute_kernels(&j, 1.0 / temperature, &grid).unwrap();
        for delta in [0.2, 0.6] {
            let nm = nm_bre_propagate(delta, &kernels, &grid, spin_up()).unwrap().to_reduced().unwrap();
            let m = m_bre_propagate(delta, &kernels, &grid, spin_up()).unwrap().to_reduced().unwrap();
            for series in [nm, m] {
                for tau in [0.5, 1.0, 2.0, 5.0, 10.0] {
                    let r = qsl_report(&series, tau).unwrap();
                    assert!(r.bound_ok, "xi={xi} T={temperature} delta={delta} tau={tau}: {:?}", r.tau_p);
                    let t2: f64 = qsl_tau2(&series, tau).unwrap().value;
                    assert!((t2 - r.tau2()).abs() < 1e-10 * t2);
                }
            }
        }
    }
}

#[test]
fn nm_bre_with_constant_memory_oscillates() {
    // with no tunnelling and M1 = c the memory terms give x'' = -c x
    let c = 2.0f64;
    let grid = TimeGrid::spanning(0.001f64, 5.0).unwrap();
    let n = 2 * grid.n_steps + 1;
    let kernels = KernelTable {
        dt: grid.dt / 2.0,
        m1: vec![c; n],
        m2: vec![0.0; n],
        n_omega: 0,
        omega_upper: 0.0,
    };
    let s = nm_bre_propagate(0.0, &kernels, &grid, [0.6, 0.8, 0.0]).unwrap();
    for k in 0..grid.n_points() {
        let w = (c.sqrt() * grid.time(k)).cos();
        assert!((s.b[k][0] - 0.6 * w).abs() < 1e-5 && (s.b[k][1] - 0.8 * w).abs() < 1e-5, "t={}", grid.time(k));
        assert_eq!(s.b[k][2], 0.0);
    }
}

#[test]
fn bre_variants_agree_at_short_times() {
    let j = SpectralDensity::OhmicExponential { xi: 0.5, omega_c: 1.0 };
    let grid = TimeGrid::spanning(0.001f64, 0.4).unwrap();
    let kernels = compute_kernels(&j, 1.0, &grid).unwrap();
    let nm = nm_bre_propagate(0.2, &kernels, &grid, spin_up()).unwrap();
    let m = m_bre_propagate(0.2, &kernels, &grid, spin_up()).unwrap();
    let gap = |t: f64| {
        let k = grid.index_of(t).unwrap();
        (0..3).map(|i| (nm.b[k][i] - m.b[k][i]).abs()).fold(0.0, f64::max)
    };
    let order = (gap(0.2) / gap(0.1)).log2();
    assert!(order > 2.8, "difference grows as t^{order}");
}
