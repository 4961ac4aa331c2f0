//! End-to-end acceptance suite.
//!
//! Each test prints exactly one `acceptance ACn <slug>: PASS/FAIL (...)` line
//! before asserting, so a full run doubles as a checklist. Tolerances are
//! pinned in the assertions; the windows on swept argmax locations come from
//! an independent reference implementation run ahead of this build.

use std::time::Instant;

use bowley::oracle::{
    battery, discrete_best_response, quantile_route_profit, random_dominated_piecewise,
    random_dominated_tabulated, random_dominated_tvar, random_dominated_var, DiscreteGrid,
};
use bowley::{
    best_response, compare, drm_of_loss, equilibrium_from_pareto, is_pareto_optimal,
    policyholder_objective, solve, Contract, DistortionFunction, Error, LossModel, TiePolicy,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const RES: usize = 4096;

fn verdict(criterion: &str, pass: bool, detail: &str) {
    // Write straight to the stdout handle so the verdict line survives the
    // harness's per-test output capture and shows up in plain `cargo test`.
    use std::io::Write;
    let line = format!(
        "\nacceptance {criterion}: {} ({detail})\n",
        if pass { "PASS" } else { "FAIL" }
    );
    std::io::stdout().write_all(line.as_bytes()).unwrap();
    assert!(pass, "{criterion}: {detail}");
}

/// Profit profile over the standard weighting grid theta in {0.30 .. 0.80}:
/// (theta, first crossing t1, equilibrium profit) per grid point.
fn profit_profile(m: &LossModel) -> Vec<(f64, f64, f64)> {
    (0..=50)
        .map(|i| {
            let theta = 0.30 + 0.01 * i as f64;
            let t = DistortionFunction::tversky_kahneman(theta).expect("theta in (0.28, 1]");
            let eq = solve(&t, m, TiePolicy::Retain, RES).expect("solve on the sweep grid");
            let t1 = eq
                .crossing_set
                .points
                .first()
                .copied()
                .expect("inverse-S weighting has an interior crossing");
            (theta, t1, eq.profit)
        })
        .collect()
}

/// Index of the first row attaining the maximal profit.
fn first_argmax(rows: &[(f64, f64, f64)]) -> usize {
    let mut best = 0;
    for (i, row) in rows.iter().enumerate() {
        if row.2 > rows[best].2 {
            best = i;
        }
    }
    best
}

#[test]
fn ac1_uniform_profit_curve_has_interior_argmax() {
    let started = Instant::now();
    let rows = profit_profile(&LossModel::uniform(10.0).unwrap());
    let elapsed = started.elapsed().as_secs_f64();

    let idx = first_argmax(&rows);
    let (_, t1, _) = rows[idx];
    let interior = idx > 0 && idx + 1 < rows.len();
    let in_window = (0.29..=0.35).contains(&t1);
    let fast_enough = elapsed < 10.0;
    verdict(
        "AC1 uniform-profit-curve-argmax",
        interior && in_window && fast_enough,
        &format!(
            "argmax t1={t1:.6} in [0.29, 0.35], interior={interior}, swept 51 solves in {elapsed:.2}s < 10s"
        ),
    );
}

#[test]
fn ac2_truncated_exponential_argmax_shifts_left_with_rate() {
    let sweep = |lambda: f64| {
        profit_profile(&LossModel::truncated_exponential(lambda, 10.0).unwrap())
    };

    let rows_01 = sweep(0.1);
    let t1_01 = rows_01[first_argmax(&rows_01)].1;
    let ok_01 = (0.27..=0.33).contains(&t1_01);

    let rows_05 = sweep(0.5);
    let t1_05 = rows_05[first_argmax(&rows_05)].1;
    let ok_05 = (0.19..=0.25).contains(&t1_05);

    let rows_10 = sweep(1.0);
    let idx_10 = first_argmax(&rows_10);
    let t1_10 = rows_10[idx_10].1;
    let left_of_05 = t1_10 < t1_05;
    let mut non_increasing = true;
    for i in idx_10..rows_10.len() - 1 {
        if rows_10[i + 1].2 > rows_10[i].2 + 1e-9 {
            non_increasing = false;
        }
    }

    verdict(
        "AC2 truncexp-argmax-shift",
        ok_01 && ok_05 && left_of_05 && non_increasing,
        &format!(
            "lambda=0.1: t1={t1_01:.6} in [0.27, 0.33]; lambda=0.5: t1={t1_05:.6} in [0.19, 0.25]; \
             lambda=1: t1={t1_10:.6} < {t1_05:.6} and profit non-increasing past argmax (1e-9 slack)"
        ),
    );
}

#[test]
fn ac3_kumaraswamy_argmax_windows_and_pointwise_profit_dominance() {
    let sweep = |a: f64, b: f64| {
        profit_profile(&LossModel::kumaraswamy(a, b, 10.0).unwrap())
    };

    let rows_15_1 = sweep(1.5, 1.0);
    let t1_15_1 = rows_15_1[first_argmax(&rows_15_1)].1;
    let ok_15_1 = (0.29..=0.35).contains(&t1_15_1);

    let rows_15_05 = sweep(1.5, 0.5);
    let t1_15_05 = rows_15_05[first_argmax(&rows_15_05)].1;
    let ok_15_05 = (0.34..=0.40).contains(&t1_15_05);

    let rows_2_03 = sweep(2.0, 0.3);
    let t1_2_03 = rows_2_03[first_argmax(&rows_2_03)].1;
    let ok_2_03 = (0.37..=0.43).contains(&t1_2_03);

    // Heavier upper tail mass removed (b down from 1 to 0.5) lowers the
    // insurer's profit at every swept preference parameter.
    let mut pointwise = true;
    for (low, high) in rows_15_05.iter().zip(rows_15_1.iter()) {
        if low.2 > high.2 + 1e-9 {
            pointwise = false;
        }
    }

    verdict(
        "AC3 kumaraswamy-argmax-windows",
        ok_15_1 && ok_15_05 && ok_2_03 && pointwise,
        &format!(
            "(1.5,1): t1={t1_15_1:.6} in [0.29, 0.35]; (1.5,0.5): t1={t1_15_05:.6} in [0.34, 0.40]; \
             (2,0.3): t1={t1_2_03:.6} in [0.37, 0.43]; profit(1.5,0.5) <= profit(1.5,1) pointwise (1e-9)"
        ),
    );
}

#[test]
fn ac4_closed_form_spot_values() {
    let m = LossModel::uniform(10.0).unwrap();

    let tvar = DistortionFunction::tvar(0.9).unwrap();
    let eq_tvar = solve(&tvar, &m, TiePolicy::Retain, RES).unwrap();
    let tvar_profit_ok = (eq_tvar.profit - 4.5).abs() <= 1e-7;
    let full = (eq_tvar.indemnity.indemnity_at(10.0) - 10.0).abs() <= 1e-9
        && (eq_tvar.indemnity.indemnity_at(3.7) - 3.7).abs() <= 1e-9;

    let var = DistortionFunction::var(0.9).unwrap();
    let eq_var = solve(&var, &m, TiePolicy::Retain, RES).unwrap();
    let var_profit_ok = (eq_var.profit - 4.05).abs() <= 1e-6;
    let cap = eq_var.indemnity.indemnity_at(10.0);
    let capped = (cap - 9.0).abs() <= 1e-6 && (eq_var.indemnity.indemnity_at(5.0) - 5.0).abs() <= 1e-9;

    verdict(
        "AC4 closed-form-spot-values",
        tvar_profit_ok && full && var_profit_ok && capped,
        &format!(
            "tvar(0.9): profit={:.9} (target 4.5 +- 1e-7), full insurance={full}; \
             var(0.9): profit={:.9} (target 4.05 +- 1e-6), cap={cap:.9} (target 9 +- 1e-6)",
            eq_tvar.profit, eq_var.profit
        ),
    );
}

#[test]
fn ac5_equilibrium_leaves_the_policyholder_indifferent() {
    let mut worst = (0.0_f64, String::new());
    for (name, t, m) in battery() {
        let eq = solve(&t, &m, TiePolicy::Retain, RES).unwrap();
        let gap = (eq.policyholder_risk - drm_of_loss(&m, &t).unwrap()).abs();
        if gap > worst.0 {
            worst = (gap, name);
        }
    }
    verdict(
        "AC5 equilibrium-indifference",
        worst.0 <= 1e-7,
        &format!(
            "worst |risk(contract) - risk(uninsured)| = {:.3e} <= 1e-7 (pair: {})",
            worst.0, worst.1
        ),
    );
}

#[test]
fn ac6_profit_routes_agree_across_the_battery() {
    let mut worst = (f64::NEG_INFINITY, String::new());
    let mut pass = true;
    for (name, t, m) in battery() {
        let eq = solve(&t, &m, TiePolicy::Retain, RES).unwrap();
        let quantile = quantile_route_profit(&t, &m, 1 << 18).unwrap();
        let tol = if matches!(t, DistortionFunction::VaR { .. }) {
            1e-4
        } else {
            1e-6
        };
        let gap = (quantile - eq.profit).abs();
        if gap > tol {
            pass = false;
        }
        // Track strain against the per-family tolerance, not the raw gap.
        if gap / tol > worst.0 {
            worst = (gap / tol, format!("{name}: gap {gap:.3e} vs tol {tol:.0e}"));
        }
    }
    verdict(
        "AC6 profit-route-agreement",
        pass,
        &format!(
            "layer vs quantile route within 1e-6 (smooth) / 1e-4 (jump family); worst strain {:.3}% ({})",
            100.0 * worst.0,
            worst.1
        ),
    );
}

#[test]
fn ac7_random_and_discrete_oracles_do_not_falsify_the_equilibrium() {
    let pricing_g = DistortionFunction::tvar(0.95).unwrap();
    let mut worst_search = (f64::NEG_INFINITY, String::new());
    let mut worst_discrete = (0.0_f64, String::new());

    for (index, (name, t, m)) in battery().into_iter().enumerate() {
        let eq = solve(&t, &m, TiePolicy::Retain, RES).unwrap();
        let found =
            bowley::oracle::random_pricing_search(&t, &m, 1000, 16, 7_u64.wrapping_add(index as u64))
                .unwrap();
        let exceedance = found - eq.profit;
        if exceedance > worst_search.0 {
            worst_search = (exceedance, name.clone());
        }

        let grid = DiscreteGrid::new(4096, m.bound()).unwrap();
        let (_, discrete) = discrete_best_response(&t, &pricing_g, &m, &grid).unwrap();
        let (analytic_ind, _) =
            best_response(&t, &pricing_g, &m, TiePolicy::Retain, RES).unwrap();
        let analytic = policyholder_objective(&analytic_ind, &m, &t, &pricing_g).unwrap();
        let gap = (discrete - analytic).abs();
        if gap > worst_discrete.0 {
            worst_discrete = (gap, name);
        }
    }

    verdict(
        "AC7 oracle-non-falsification",
        worst_search.0 <= 1e-6 && worst_discrete.0 <= 1e-3,
        &format!(
            "20 pairs x 1000 random pricings: worst exceedance {:.3e} <= 1e-6 ({}); \
             discrete response at n=4096: worst objective gap {:.3e} <= 1e-3 ({})",
            worst_search.0, worst_search.1, worst_discrete.0, worst_discrete.1
        ),
    );
}

#[test]
fn ac8_dominated_distortions_yield_dominated_equilibria() {
    let m = LossModel::uniform(10.0).unwrap();
    let families: [(&str, fn(&mut ChaCha8Rng) -> (DistortionFunction, DistortionFunction)); 4] = [
        ("tvar", random_dominated_tvar::<ChaCha8Rng>),
        ("var", random_dominated_var::<ChaCha8Rng>),
        ("piecewise", random_dominated_piecewise::<ChaCha8Rng>),
        ("tabulated", random_dominated_tabulated::<ChaCha8Rng>),
    ];
    let mut checked = 0usize;
    let mut pass = true;
    let mut detail = String::new();
    for (fi, (family, gen)) in families.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xac08 + fi as u64);
        let mut worst_ind = f64::NEG_INFINITY;
        let mut worst_profit = f64::NEG_INFINITY;
        for _ in 0..50 {
            let (low, high) = gen(&mut rng);
            let report = compare(&low, &high, &m, RES).unwrap();
            pass &= report.indemnity_dominated && report.profit_dominated;
            worst_ind = worst_ind.max(report.max_indemnity_excess);
            worst_profit = worst_profit.max(report.profit_excess);
            checked += 1;
        }
        if fi > 0 {
            detail.push_str("; ");
        }
        detail.push_str(&format!(
            "{family}: worst indemnity excess {worst_ind:.1e}, worst profit excess {worst_profit:.1e}"
        ));
    }
    verdict(
        "AC8 comparative-statics",
        pass && checked == 200,
        &format!("{checked} dominated pairs, dominance within 1e-8 slack; {detail}"),
    );
}

#[test]
fn ac9_pareto_round_trip_across_the_battery() {
    let mut worst_gap = (0.0_f64, String::new());
    let mut worst_premium = 0.0_f64;
    let mut shift_ok = true;
    let mut pass = true;

    for (name, t, m) in battery() {
        let eq = solve(&t, &m, TiePolicy::Retain, RES).unwrap();
        let contract = Contract::new(eq.indemnity.clone(), eq.premium).unwrap();

        let certificate = is_pareto_optimal(&contract, &m, &t, RES, 0).unwrap();
        pass &= certificate.is_optimal;
        if certificate.gap > worst_gap.0 {
            worst_gap = (certificate.gap, name.clone());
        }

        let back = equilibrium_from_pareto(&contract, &m, &t, RES).unwrap();
        worst_premium = worst_premium.max((back.premium - eq.premium).abs());

        let shifted = Contract::new(eq.indemnity.clone(), eq.premium + 0.1).unwrap();
        match equilibrium_from_pareto(&shifted, &m, &t, RES) {
            Err(Error::NotIndifferent { gap }) => {
                shift_ok &= (gap - 0.1).abs() <= 1e-9;
            }
            _ => shift_ok = false,
        }
    }

    verdict(
        "AC9 pareto-round-trip",
        pass && worst_gap.0 <= 1e-7 && worst_premium <= 1e-7 && shift_ok,
        &format!(
            "worst certificate gap {:.3e} <= 1e-7 ({}); worst premium reproduction {:.3e} <= 1e-7; \
             +0.1 premium shift rejected with gap 0.1 +- 1e-9 on every pair",
            worst_gap.0, worst_gap.1, worst_premium
        ),
    );
}
