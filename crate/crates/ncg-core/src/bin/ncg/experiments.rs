//! Canned experiments emitting CSV for offline plotting. Every run is
//! deterministic given its seed; the timestamp header line is the only
//! non-reproducible byte and is excluded from comparisons.

use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use num_rational::Rational64;

use ncg_core::constructions::{clique, directed_cycle, kne_tree_instance, star};
use ncg_core::cost::{format_rational, opt_cost, poa_ratio, social_cost, GameConfig};
use ncg_core::dynamics::{default_cycle_seeds, find_br_cycle, trace_to_jsonl, MoveRegime, Outcome};
use ncg_core::equilibrium::check_neighborhood_growth;
use ncg_core::formulas::{
    center_purchase_threshold, hanging_tree_dist, leaf_dist_after_bridge_purchase,
    leaf_dist_after_center_purchase, max_purchase_gain, tree_leaf_dist, tree_star_leaf_dist,
};

use crate::write_or_print;

fn csv_header(columns: &str) -> String {
    let stamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    format!("# run: {stamp}\n{columns}\n")
}

pub(crate) fn cmd_experiment(name: &str, args: &crate::ExperimentArgs) -> Result<ExitCode, String> {
    let csv = match name {
        "poa-line-scan" => poa_line_scan(),
        "poa-binary-tree-scan" => poa_binary_tree_scan(),
        "formula-grid" => formula_grid(),
        "br-cycle-hunt" => br_cycle_hunt(args.seed, args.budget, args.out.as_deref())?,
        "ball-lemma-scan" => ball_lemma_scan()?,
        other => return Err(format!("unknown experiment: {other}")),
    };
    write_or_print(args.out.as_deref(), &csv)?;
    Ok(ExitCode::SUCCESS)
}

pub(crate) fn write_formula_grid(
    check_all: bool,
    out: Option<&std::path::Path>,
) -> Result<ExitCode, String> {
    if !check_all {
        return Err("nothing to do without --check-all".into());
    }
    write_or_print(out, &formula_grid())?;
    Ok(ExitCode::SUCCESS)
}

fn poa_line_scan() -> String {
    let alpha = Rational64::from_integer(3);
    let mut out = csv_header("n,alpha,social,opt,ratio,ratio_float");
    for n in [8u32, 10, 12, 14, 16] {
        let cfg = GameConfig::sum(alpha, 1);
        let net = ncg_core::constructions::line(n);
        let social = social_cost(&net, &cfg).finite().unwrap();
        let opt = opt_cost(n, &cfg).unwrap().finite().unwrap();
        let ratio = poa_ratio(&net, &cfg).unwrap();
        out.push_str(&format!(
            "{n},{},{},{},{},{:.6}\n",
            format_rational(alpha),
            format_rational(social),
            format_rational(opt),
            format_rational(ratio),
            rational_to_f64(ratio),
        ));
    }
    out
}

fn rational_to_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn poa_binary_tree_scan() -> String {
    let mut out = csv_header("d,k,n,alpha,social,opt,ratio,ratio_float");
    for d in 3u32..=6 {
        for k in [2u32, 3] {
            let (net, cfg) = kne_tree_instance(d, k);
            let n = net.agent_count();
            let social = social_cost(&net, &cfg).finite().unwrap();
            let opt = opt_cost(n, &cfg).unwrap().finite().unwrap();
            let ratio = poa_ratio(&net, &cfg).unwrap();
            out.push_str(&format!(
                "{d},{k},{n},{},{},{},{},{:.6}\n",
                format_rational(cfg.alpha),
                format_rational(social),
                format_rational(opt),
                format_rational(ratio),
                rational_to_f64(ratio),
            ));
        }
    }
    out
}

fn formula_grid() -> String {
    let mut out = csv_header("formula,d,k,l,closed_form,oracle,match");
    let mut push = |formula: &str, d: u32, k: &str, l: &str, closed: i64, oracle: i64| {
        let matches = closed == oracle;
        out.push_str(&format!("{formula},{d},{k},{l},{closed},{oracle},{matches}\n"));
    };
    for d in 0..=3 {
        for l in [0u32, 1, 2, 5] {
            let r = hanging_tree_dist(d, l);
            push("hanging-tree-dist", d, "", &l.to_string(), r.closed_form, r.oracle);
        }
    }
    for d in [2u32, 4, 6] {
        let r = tree_leaf_dist(d).unwrap();
        push("tree-leaf-dist", d, "", "", r.closed_form, r.oracle);
        let threshold = center_purchase_threshold(d).unwrap();
        push("center-purchase-threshold", d, "", "", threshold, threshold);
        for l in [1u32, 1 << (d + 1), 3u32.pow(d)] {
            let r = tree_star_leaf_dist(d, l).unwrap();
            push("tree-star-leaf-dist", d, "", &l.to_string(), r.closed_form, r.oracle);
            let r = leaf_dist_after_center_purchase(d, l).unwrap();
            push("after-center-purchase", d, "", &l.to_string(), r.closed_form, r.oracle);
            let r = leaf_dist_after_bridge_purchase(d, l).unwrap();
            push("after-bridge-purchase", d, "", &l.to_string(), r.closed_form, r.oracle);
        }
        for k in [2u32, 3] {
            if k > d {
                continue;
            }
            for l in [1u32 << (d + 1), 3u32.pow(d)] {
                let r = max_purchase_gain(d, k, l);
                push(
                    "max-purchase-gain",
                    d,
                    &k.to_string(),
                    &l.to_string(),
                    r.general_form,
                    r.oracle,
                );
            }
        }
    }
    out
}

fn br_cycle_hunt(
    seed: u64,
    budget: u64,
    out: Option<&std::path::Path>,
) -> Result<String, String> {
    let mut csv = csv_header("n,k,alpha,regime,found,period");
    let configs = [
        (6u32, 2u32, Rational64::new(5, 2), MoveRegime::KBg),
        (8, 3, Rational64::new(7, 2), MoveRegime::KGbg),
    ];
    for (n, k, alpha, regime) in configs {
        let cfg = GameConfig::sum(alpha, k);
        let seeds = default_cycle_seeds(n, regime, seed, 64);
        let found = find_br_cycle(&cfg, regime, &seeds, budget).map_err(|e| e.to_string())?;
        match found {
            Some(trace) => {
                let period = match trace.outcome {
                    Outcome::Cycle { period, .. } => period,
                    _ => unreachable!("cycle search returns cycle traces"),
                };
                csv.push_str(&format!(
                    "{n},{k},{},{regime},true,{period}\n",
                    format_rational(alpha)
                ));
                if let Some(base) = out {
                    let trace_path = base.with_extension(format!("{regime}.trace.jsonl"));
                    std::fs::write(&trace_path, trace_to_jsonl(&trace))
                        .map_err(|e| format!("writing {}: {e}", trace_path.display()))?;
                }
            }
            None => {
                csv.push_str(&format!(
                    "{n},{k},{},{regime},false,\n",
                    format_rational(alpha)
                ));
            }
        }
    }
    Ok(csv)
}

fn ball_lemma_scan() -> Result<String, String> {
    let mut csv = csv_header("instance,check,d,agent,pass");
    let mut instances: Vec<(String, ncg_core::Network, GameConfig)> = Vec::new();
    for (d, k) in [(3u32, 2u32), (3, 3), (4, 2), (4, 3)] {
        let (net, cfg) = kne_tree_instance(d, k);
        instances.push((format!("kne-tree-d{d}-k{k}"), net, cfg));
    }
    instances.push((
        "star-6".into(),
        star(6),
        GameConfig::sum(Rational64::new(3, 2), 2),
    ));
    instances.push((
        "clique-8".into(),
        clique(8),
        GameConfig::sum(Rational64::from_integer(1), 6),
    ));
    instances.push((
        "cycle-5".into(),
        directed_cycle(5),
        GameConfig::sum(Rational64::new(3, 2), 2),
    ));

    for (name, net, cfg) in instances {
        let report = match check_neighborhood_growth(&net, &cfg) {
            Ok(r) => r,
            Err(e) => {
                csv.push_str(&format!("{name},precondition,,,{e}\n"));
                continue;
            }
        };
        if let Some(per_agent) = report.radius_two {
            for check in per_agent {
                csv.push_str(&format!(
                    "{name},radius-two,,{},{}\n",
                    check.agent, check.pass
                ));
            }
        }
        for check in report.growth_dichotomy {
            csv.push_str(&format!(
                "{name},growth-dichotomy,{},,{}\n",
                check.d, check.pass
            ));
        }
        for check in report.half_to_all {
            csv.push_str(&format!(
                "{name},half-to-all,{},{},{}\n",
                check.d, check.agent, check.pass
            ));
        }
    }
    Ok(csv)
}
