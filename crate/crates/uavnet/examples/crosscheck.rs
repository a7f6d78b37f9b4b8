//! Quick dual-path comparison at the default configuration: association
//! probabilities, conditional/overall coverage, and TU coverage, analytic vs
//! Monte Carlo.

use uavnet::analytic::AnalyticModel;
use uavnet::assoc::AuCase;
use uavnet::mcharness::{estimate_assoc_freq, estimate_coverage};
use uavnet::netmodel::{db_to_linear, NetworkConfig};
use uavnet::Scheme;

fn main() {
    let cfg = NetworkConfig::default();
    let n = 10_000;
    let seed = 20_240_817;

    let t0 = std::time::Instant::now();
    let model = AnalyticModel::new(cfg.clone()).unwrap();
    let assoc = model.assoc_probs().unwrap();
    println!("analytic assoc ({:?}):", t0.elapsed());
    let freqs = estimate_assoc_freq(&cfg, n, seed).unwrap();
    let mut sum = 0.0;
    for case in AuCase::ALL {
        let a = assoc[case.index()];
        sum += a.value;
        println!(
            "  {:10}  analytic {:.4} (err {:.1e})   mc {:.4} ± {:.4}   diff {:+.4}",
            case.label(),
            a.value,
            a.error,
            freqs.freq[case.index()],
            freqs.ci[case.index()],
            a.value - freqs.freq[case.index()]
        );
    }
    println!("  assoc sum = {sum:.6}");

    let thresholds_db = [-10.0, -5.0, 0.0, 5.0];
    let thresholds: Vec<f64> = thresholds_db.iter().map(|&d| db_to_linear(d)).collect();
    let t1 = std::time::Instant::now();
    let mc = estimate_coverage(&cfg, Scheme::CompNoma, &thresholds, n, seed).unwrap();
    println!("mc coverage took {:?}", t1.elapsed());

    for (ti, &tdb) in thresholds_db.iter().enumerate() {
        let t2 = std::time::Instant::now();
        let total = model.coverage_total_au(thresholds[ti]).unwrap();
        let tu = model.coverage_tu(thresholds[ti]).unwrap();
        println!(
            "T = {tdb:+.0} dB: overall analytic {:.4} mc {:.4} (diff {:+.4});  tu analytic {:.4} mc {:.4} (diff {:+.4})  [{:?}]",
            total.value,
            mc.overall[ti],
            total.value - mc.overall[ti],
            tu.value,
            mc.tu[ti],
            tu.value - mc.tu[ti],
            t2.elapsed()
        );
        for case in AuCase::ALL {
            let p = model.coverage_case(case, thresholds[ti]).unwrap();
            let m = mc.cond_coverage[case.index()][ti];
            println!(
                "    {:10} analytic {:.4}  mc {:.4} ± {:.4}  diff {:+.4}",
                case.label(),
                p.value,
                m,
                mc.cond_ci[case.index()][ti],
                p.value - m
            );
        }
    }
}
