//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//!
//! Run with `cargo test -p tdosc-core --test acceptance -- --nocapture` to
//! see the per-criterion summary lines.

use num_complex::Complex64;
use std::f64::consts::PI;

use tdosc_core::{
    appendix_reference_state, casimir_residual, coherent_state, gaussian_params,
    grid_covering_span, l2_distance, ladder_action_residual, number_eigen_residual, number_state,
    propagate, schrodinger_residual, solve_xi, squeezed_state, state, states, tq_state_direct,
    wronskian_scan_tm, Frame, LadderDirection, PropagatorConfig, SpatialGrid, StateLabel, System,
    SystemSpec, TimeProfile, WRONSKIAN_TOL,
};

fn report(criterion: &str, pass: bool, detail: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("[{tag}] {criterion}: {detail}");
    assert!(pass, "{criterion} failed: {detail}");
}

fn harmonic_spec() -> SystemSpec {
    SystemSpec::new(TimeProfile::constant(0.0), TimeProfile::constant(0.5), 0.0).unwrap()
}

fn free_spec() -> SystemSpec {
    SystemSpec::new(TimeProfile::constant(0.0), TimeProfile::constant(0.0), 0.0).unwrap()
}

fn ck_spec() -> SystemSpec {
    SystemSpec::new(
        TimeProfile::linear(0.5, 0.0),
        TimeProfile::constant(0.5),
        0.0,
    )
    .unwrap()
}

/// g2(t') = (1/2)(1 + 0.2 sin t') realized as an h2 modulation with nu = 0.
fn modulated_spec() -> SystemSpec {
    SystemSpec::new(
        TimeProfile::constant(0.0),
        TimeProfile::sinusoidal(0.5, 0.1, 1.0, 0.0),
        0.0,
    )
    .unwrap()
}

/// Bounded oscillating gauge: a genuinely time-dependent mass that stays
/// resolvable over many periods.
fn oscillating_mass_spec() -> SystemSpec {
    SystemSpec::new(
        TimeProfile::sinusoidal(0.0, 0.25, 1.0, 0.0),
        TimeProfile::constant(0.5),
        0.0,
    )
    .unwrap()
}

/// Weaker (+-10% mass) oscillating gauge; its packets stay resolvable at the
/// pinned oracle resolution over three full periods.
fn gentle_mass_spec() -> SystemSpec {
    SystemSpec::new(
        TimeProfile::sinusoidal(0.0, 0.05, 1.0, 0.0),
        TimeProfile::constant(0.5),
        0.0,
    )
    .unwrap()
}

#[test]
fn criterion_1_appendix_reproduction() {
    let system = System::prepare(harmonic_spec(), PI + 0.2).unwrap();
    let grid = SpatialGrid::new(-12.0, 12.0, 1024).unwrap();
    let (x0, p0) = (1.0, 0.5);
    let mut worst: f64 = 0.0;
    for r in [0.0, 0.5, 1.0] {
        for theta in [0.0, PI / 3.0] {
            for t in [0.0, PI / 4.0, PI] {
                let wave = squeezed_state(&system, Frame::To, x0, p0, r, theta, t, grid).unwrap();
                for (i, x) in grid.points().enumerate() {
                    let reference = appendix_reference_state(1.0, x0, p0, r, theta, x, t);
                    worst = worst.max((wave.values[i] - reference).norm());
                }
            }
        }
    }

    // Printed reduction at t = theta = 0: (w/pi s^2)^{1/4}
    // e^{-w (x-x0)^2 / 2 s^2} e^{i p0 x} e^{-i p0 x0 / 2} with s = e^r.
    let mut worst_reduction: f64 = 0.0;
    for r in [0.0f64, 0.5, 1.0] {
        let wave = squeezed_state(&system, Frame::To, x0, p0, r, 0.0, 0.0, grid).unwrap();
        let s2 = (2.0 * r).exp();
        for (i, x) in grid.points().enumerate() {
            let reference = (1.0 / (PI * s2)).powf(0.25)
                * (-0.5 * (x - x0) * (x - x0) / s2).exp()
                * Complex64::from_polar(1.0, p0 * x - 0.5 * p0 * x0);
            worst_reduction = worst_reduction.max((wave.values[i] - reference).norm());
        }
    }
    let pass = worst <= 1e-10 && worst_reduction <= 1e-10;
    report(
        "criterion 1 (appendix reproduction)",
        pass,
        &format!(
            "max |dpsi| = {worst:.3e} over (r, theta, t) sweep, \
             t=theta=0 reduction {worst_reduction:.3e}, tolerance 1e-10"
        ),
    );
}

#[test]
fn criterion_2_wronskian_conservation() {
    let span = 20.0 * PI; // ten natural periods at omega = 1
    let mut details = Vec::new();
    let mut worst: f64 = 0.0;

    // TO-clock solves for the profiles whose TO span is unbounded.
    type Stiffness = Box<dyn Fn(f64) -> f64>;
    let to_cases: [(&str, Stiffness); 3] = [
        ("harmonic", Box::new(|_| 0.5)),
        ("free", Box::new(|_| 0.0)),
        ("modulated", Box::new(|t: f64| 0.5 + 0.1 * t.sin())),
    ];
    for (name, g2) in &to_cases {
        let ic = tdosc_core::default_ic(g2(0.0));
        let sol = solve_xi(g2, (0.0, span), &ic, 4096).unwrap();
        details.push(format!("{name} {:.2e}", sol.max_wronskian_drift()));
        worst = worst.max(sol.max_wronskian_drift());
    }

    // Caldirola-Kanai in the TM clock, where ten periods stay resolvable.
    let spec = ck_spec();
    let scan = wronskian_scan_tm(&spec, span, &tdosc_core::default_ic(0.5)).unwrap();
    details.push(format!(
        "caldirola-kanai {:.2e} ({} nodes)",
        scan.max_drift, scan.nodes
    ));
    worst = worst.max(scan.max_drift);

    report(
        "criterion 2 (Wronskian conservation)",
        worst <= WRONSKIAN_TOL,
        &format!(
            "max |W + i| = {worst:.3e} <= 1e-9 over 10 periods [{}]",
            details.join(", ")
        ),
    );
}

#[test]
fn criterion_3_representation_identities() {
    let system = System::prepare(ck_spec(), 3.0).unwrap();
    let delta = 1e-6 * system.natural_period();
    let mut worst_annihilation: f64 = 0.0;
    let mut worst_ladder: f64 = 0.0;
    let mut worst_number: f64 = 0.0;
    let mut worst_casimir: f64 = 0.0;
    for frame in [Frame::To, Frame::Tm, Frame::Tq] {
        let t = match frame {
            Frame::To => system.map.forward(1.0).unwrap(),
            _ => 1.0,
        };
        let grid =
            states::auto_grid(&system, frame, &StateLabel::Number { n: 7 }, t, 4097).unwrap();
        worst_annihilation = worst_annihilation.max(
            ladder_action_residual(&system, frame, LadderDirection::Lower, 0, t, grid).unwrap(),
        );
        for n in 0..=6 {
            worst_ladder = worst_ladder.max(
                ladder_action_residual(&system, frame, LadderDirection::Raise, n, t, grid).unwrap(),
            );
            if n > 0 {
                worst_ladder = worst_ladder.max(
                    ladder_action_residual(&system, frame, LadderDirection::Lower, n, t, grid)
                        .unwrap(),
                );
            }
            worst_number =
                worst_number.max(number_eigen_residual(&system, frame, n, t, grid, delta).unwrap());
        }
        for n in [0usize, 2, 5] {
            worst_casimir =
                worst_casimir.max(casimir_residual(&system, frame, n, t, grid, delta).unwrap());
        }
    }
    let pass = worst_annihilation < 1e-6
        && worst_ladder < 1e-5
        && worst_number < 1e-5
        && worst_casimir < 1e-5;
    report(
        "criterion 3 (representation identities)",
        pass,
        &format!(
            "annihilation {worst_annihilation:.2e} (<1e-6), ladder {worst_ladder:.2e} (<1e-5), \
             number {worst_number:.2e} (<1e-5), casimir {worst_casimir:.2e} (<1e-5), \
             all frames, Caldirola-Kanai"
        ),
    );
}

#[test]
fn criterion_4_schrodinger_residuals() {
    let specs = [
        ("harmonic", harmonic_spec()),
        ("free", free_spec()),
        ("caldirola-kanai", ck_spec()),
        ("modulated", modulated_spec()),
    ];
    let labels: Vec<StateLabel> = (0..=4)
        .map(|n| StateLabel::Number { n })
        .chain([
            StateLabel::Coherent { x0: 1.0, p0: 0.5 },
            StateLabel::Squeezed {
                x0: 1.0,
                p0: 0.5,
                r: 0.5,
                theta: PI / 3.0,
            },
            StateLabel::Squeezed {
                x0: 1.0,
                p0: 0.5,
                r: 1.0,
                theta: 0.0,
            },
        ])
        .collect();
    let delta = 1e-6 * 2.0 * PI;
    let mut worst: f64 = 0.0;
    let mut worst_order = f64::INFINITY;
    for (name, spec) in specs {
        let system = System::prepare(spec, 3.0).unwrap();
        for frame in [Frame::To, Frame::Tm, Frame::Tq] {
            let t = match frame {
                Frame::To => system.map.forward(1.0).unwrap(),
                _ => 1.0,
            };
            for label in &labels {
                let grid = states::auto_grid(&system, frame, label, t, 3073).unwrap();
                let r = schrodinger_residual(&system, frame, label, t, grid, delta).unwrap();
                assert!(r < 1e-5, "residual {r:.3e} for {name}/{frame}/{label:?}");
                worst = worst.max(r);
            }
            // Spatial convergence order on the strongly squeezed case,
            // measured on a coarser pair so the stencil error dominates
            // the temporal floor.
            let label = &labels[labels.len() - 1];
            let coarse_grid = states::auto_grid(&system, frame, label, t, 513).unwrap();
            let fine_grid = states::auto_grid(&system, frame, label, t, 1025).unwrap();
            let coarse =
                schrodinger_residual(&system, frame, label, t, coarse_grid, delta).unwrap();
            let fine = schrodinger_residual(&system, frame, label, t, fine_grid, delta).unwrap();
            let order = (coarse / fine).log2();
            assert!(
                order >= 3.5,
                "spatial order {order:.2} for {name}/{frame} (coarse {coarse:.2e}, fine {fine:.2e})"
            );
            worst_order = worst_order.min(order);
        }
    }
    report(
        "criterion 4 (Schrodinger residuals)",
        worst < 1e-5 && worst_order >= 3.5,
        &format!(
            "max residual {worst:.3e} (<1e-5) over 4 profiles x 3 frames x 8 states; \
             min spatial order {worst_order:.2} (>=3.5)"
        ),
    );
}

#[test]
fn criterion_5_oracle_equivalence() {
    // Three+ natural periods at the pinned resolution N = 2048, dt = 1e-4.
    let t_final = 3.0 * 2.0 * PI;
    let label = StateLabel::Coherent { x0: 0.5, p0: 0.25 };
    let mut details = Vec::new();
    let mut worst: f64 = 0.0;

    let runs: [(&str, SystemSpec, Frame); 3] = [
        ("harmonic/to", harmonic_spec(), Frame::To),
        ("modulated/to", modulated_spec(), Frame::To),
        ("oscillating-mass/tm", gentle_mass_spec(), Frame::Tm),
    ];
    for (name, spec, frame) in runs {
        let system = System::prepare(spec, t_final + 0.5).unwrap();
        let grid = grid_covering_span(&system, frame, &label, (0.0, t_final), 2048).unwrap();
        let cfg = PropagatorConfig::new(frame, grid, 1e-4, t_final);
        let initial = state(&system, frame, &label, 0.0, grid).unwrap();
        let outcome = propagate(&system, &cfg, &initial).unwrap();
        let reference = state(&system, frame, &label, t_final, grid).unwrap();
        let dist = l2_distance(&outcome.wave, &reference).unwrap();
        details.push(format!("{name} {dist:.2e}"));
        worst = worst.max(dist);
        assert!(outcome.norm_drift < 1e-8);
    }

    // Caldirola-Kanai TM run over the span its width collapse permits at
    // this fixed box (the e^{-t/2} localization rules out three periods).
    {
        let system = System::prepare(ck_spec(), 2.0).unwrap();
        let grid = grid_covering_span(&system, Frame::Tm, &label, (0.0, 1.2), 2048).unwrap();
        let cfg = PropagatorConfig::new(Frame::Tm, grid, 1e-4, 1.2);
        let initial = state(&system, Frame::Tm, &label, 0.0, grid).unwrap();
        let outcome = propagate(&system, &cfg, &initial).unwrap();
        let reference = state(&system, Frame::Tm, &label, 1.2, grid).unwrap();
        let dist = l2_distance(&outcome.wave, &reference).unwrap();
        details.push(format!("caldirola-kanai/tm(short) {dist:.2e}"));
        worst = worst.max(dist);
    }

    // Order ~2 in dt by self-convergence (spatial error cancels exactly).
    let system = System::prepare(harmonic_spec(), 2.0).unwrap();
    let grid = SpatialGrid::new(-7.0, 7.0, 1025).unwrap();
    let initial = state(&system, Frame::To, &label, 0.0, grid).unwrap();
    let run_dt = |dt: f64| {
        let cfg = PropagatorConfig::new(Frame::To, grid, dt, 1.0);
        propagate(&system, &cfg, &initial).unwrap().wave
    };
    let reference = run_dt(1e-4);
    let d_coarse = l2_distance(&run_dt(8e-4), &reference).unwrap();
    let d_fine = l2_distance(&run_dt(4e-4), &reference).unwrap();
    let order = (d_coarse / d_fine).log2();

    let pass = worst < 1e-4 && (order - 2.0).abs() < 0.25;
    report(
        "criterion 5 (oracle equivalence)",
        pass,
        &format!(
            "max raw L2 distance {worst:.3e} (<1e-4) over 3+ periods at N=2048, dt=1e-4 \
             [{}]; dt order {order:.2} (~2)",
            details.join(", ")
        ),
    );
}

#[test]
fn criterion_6_reduction_chain() {
    let system = System::prepare(modulated_spec(), 5.0).unwrap();
    let grid = SpatialGrid::new(-10.0, 10.0, 1025).unwrap();
    let t = 2.0;
    let mut worst: f64 = 0.0;

    // squeezed(r = 0) == coherent, coherent(0, 0) == number(0), pointwise.
    for frame in [Frame::To, Frame::Tm, Frame::Tq] {
        let s = squeezed_state(&system, frame, 0.7, -0.3, 0.0, 1.2, t, grid).unwrap();
        let c = coherent_state(&system, frame, 0.7, -0.3, t, grid).unwrap();
        for i in 0..grid.len() {
            worst = worst.max((s.values[i] - c.values[i]).norm());
        }
        let c0 = coherent_state(&system, frame, 0.0, 0.0, t, grid).unwrap();
        let n0 = number_state(&system, frame, 0, t, grid).unwrap();
        for i in 0..grid.len() {
            worst = worst.max((c0.values[i] - n0.values[i]).norm());
        }
    }

    // nu == 0 makes the three frames pointwise identical.
    let label = StateLabel::Squeezed {
        x0: 0.6,
        p0: -0.2,
        r: 0.5,
        theta: 0.4,
    };
    let to = state(&system, Frame::To, &label, t, grid).unwrap();
    let tm = state(&system, Frame::Tm, &label, t, grid).unwrap();
    let tq = state(&system, Frame::Tq, &label, t, grid).unwrap();
    for i in 0..grid.len() {
        worst = worst.max((to.values[i] - tm.values[i]).norm());
        worst = worst.max((to.values[i] - tq.values[i]).norm());
    }

    report(
        "criterion 6 (reduction chain)",
        worst <= 1e-12,
        &format!("max pointwise defect {worst:.3e} <= 1e-12"),
    );
}

#[test]
fn criterion_7_frame_map_consistency() {
    // (a) TQ via dilation vs direct evaluation.
    let system = System::prepare(ck_spec(), 3.0).unwrap();
    let grid = SpatialGrid::new(-10.0, 10.0, 1025).unwrap();
    let labels = [
        StateLabel::Number { n: 2 },
        StateLabel::Coherent { x0: 0.8, p0: -0.2 },
        StateLabel::Squeezed {
            x0: 0.5,
            p0: 0.3,
            r: 0.6,
            theta: 0.7,
        },
    ];
    let mut worst_dilation: f64 = 0.0;
    for label in &labels {
        let dilated = state(&system, Frame::Tq, label, 1.0, grid).unwrap();
        let direct = tq_state_direct(&system, label, 1.0, grid).unwrap();
        for i in 0..grid.len() {
            worst_dilation = worst_dilation.max((dilated.values[i] - direct.values[i]).norm());
        }
    }

    // (b) Time-map roundtrip on both nontrivial gauges, in the contract
    // direction forward(inverse(y)) = y and in t-space where the map does
    // not saturate.
    let mut worst_roundtrip: f64 = 0.0;
    for spec in [ck_spec(), oscillating_mass_spec()] {
        let sys = System::prepare(spec, 6.0).unwrap();
        let (lo, hi) = sys.map.t_range();
        let (plo, phi) = sys.map.tprime_range();
        for k in 0..1000 {
            let frac = (k as f64 * 0.618_033_988_749_894_9).fract();
            let t = lo + (hi - lo) * frac;
            let back = sys.map.inverse(sys.map.forward(t).unwrap()).unwrap();
            worst_roundtrip = worst_roundtrip.max((back - t).abs());
            let y = plo + (phi - plo) * frac;
            let again = sys.map.forward(sys.map.inverse(y).unwrap()).unwrap();
            worst_roundtrip = worst_roundtrip.max((again - y).abs());
        }
    }

    // (c) TM propagation against TO propagation through t'(t).
    let label = StateLabel::Coherent { x0: 0.5, p0: 0.25 };
    let mut worst_clock: f64 = 0.0;
    for (spec, t_final) in [(oscillating_mass_spec(), 2.0 * PI), (ck_spec(), 0.8)] {
        let sys = System::prepare(spec, t_final + 0.5).unwrap();
        let tp_final = sys.map.forward(t_final).unwrap();
        let grid = grid_covering_span(&sys, Frame::Tm, &label, (0.0, t_final), 2048).unwrap();
        let tm_out = propagate(
            &sys,
            &PropagatorConfig::new(Frame::Tm, grid, 1e-4, t_final),
            &state(&sys, Frame::Tm, &label, 0.0, grid).unwrap(),
        )
        .unwrap();
        let to_out = propagate(
            &sys,
            &PropagatorConfig::new(Frame::To, grid, 1e-4, tp_final),
            &state(&sys, Frame::To, &label, 0.0, grid).unwrap(),
        )
        .unwrap();
        let mut acc = 0.0;
        for i in 0..grid.len() {
            acc += (tm_out.wave.values[i] - to_out.wave.values[i]).norm_sqr() * grid.dx();
        }
        worst_clock = worst_clock.max(acc.sqrt());
    }

    let pass = worst_dilation <= 1e-9 && worst_roundtrip <= 1e-10 && worst_clock < 1e-4;
    report(
        "criterion 7 (frame-map consistency)",
        pass,
        &format!(
            "dilation vs direct {worst_dilation:.3e} (<=1e-9), roundtrip {worst_roundtrip:.3e} \
             (<=1e-10), TM-vs-TO propagation {worst_clock:.3e} (<1e-4)"
        ),
    );
}

#[test]
fn criterion_8_reality_and_structure() {
    let mut worst_im: f64 = 0.0;
    let mut worst_xplus: f64 = 0.0;
    let mut worst_r: f64 = 0.0;
    for (spec, frame, t_ref) in [
        (modulated_spec(), Frame::To, 2.5),
        (ck_spec(), Frame::Tm, 1.0),
    ] {
        let system = System::prepare(spec, 4.0).unwrap();
        let period = system.natural_period();
        for t_frac in [0.2, 0.6, 1.0] {
            let t = t_ref * t_frac;
            let base = gaussian_params(
                &system,
                frame,
                &StateLabel::Coherent { x0: 1.0, p0: 0.5 },
                t,
            )
            .unwrap();
            for r in [0.0, 0.3, 0.7, 1.0] {
                for theta in [0.0, 1.1, 2.2, PI, 5.0] {
                    let label = StateLabel::Squeezed {
                        x0: 1.0,
                        p0: 0.5,
                        r,
                        theta,
                    };
                    let p = gaussian_params(&system, frame, &label, t).unwrap();
                    worst_im = worst_im.max(p.im_residue);
                    worst_xplus = worst_xplus.max((p.x_plus - base.x_plus).abs());
                    // R = dQ/dt' composed with the frame clock; difference in
                    // the frame clock picks up dt'/dt for TM.
                    let eps = 1e-5 * period;
                    let qm = gaussian_params(&system, frame, &label, t - eps).unwrap().q;
                    let qp = gaussian_params(&system, frame, &label, t + eps).unwrap().q;
                    let rate = match frame {
                        Frame::To => 1.0,
                        _ => system.map.rate(t).unwrap(),
                    };
                    let fd = (qp - qm) / (2.0 * eps) / rate;
                    worst_r = worst_r.max((fd - p.r).abs());
                }
            }
        }
    }
    let pass = worst_im <= 1e-10 && worst_xplus <= 1e-10 && worst_r <= 1e-6;
    report(
        "criterion 8 (reality and structure)",
        pass,
        &format!(
            "Im residue {worst_im:.3e} (<=1e-10), X+ squeeze invariance {worst_xplus:.3e} \
             (<=1e-10), R vs dQ/dt' {worst_r:.3e} (<=1e-6)"
        ),
    );
}
