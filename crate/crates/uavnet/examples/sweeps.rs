//! Rate cross-validation plus the altitude and cooperation-threshold
//! behaviors of the analytic path, printed as quick tables.

use uavnet::analytic::AnalyticModel;
use uavnet::mcharness::estimate_rate;
use uavnet::netmodel::{db_to_linear, NetworkConfig};
use uavnet::Scheme;

fn main() {
    let cfg = NetworkConfig::default();

    let t0 = std::time::Instant::now();
    let model = AnalyticModel::new(cfg.clone()).unwrap();
    let totals = model.rate_totals().unwrap();
    println!(
        "analytic rates ({:?}): nc {:.4} c {:.4} au {:.4} tu {:.4} total {:.4} (err {:.1e})",
        t0.elapsed(),
        totals.r_u_noncomp,
        totals.r_u_comp,
        totals.r_u_total,
        totals.r_t,
        totals.r_total,
        totals.error
    );
    let t1 = std::time::Instant::now();
    let mc = estimate_rate(&cfg, Scheme::CompNoma, 20_000, 7).unwrap();
    println!(
        "mc rates ({:?}):      nc {:.4} ± {:.4} c {:.4} ± {:.4} au {:.4} tu {:.4} ± {:.4} total {:.4}",
        t1.elapsed(),
        mc.r_u_noncomp,
        mc.ci_u_noncomp,
        mc.r_u_comp,
        mc.ci_u_comp,
        mc.r_u_total,
        mc.r_t,
        mc.ci_t,
        mc.r_total
    );

    println!("\naltitude sweep (analytic):");
    for h_u in [50.0, 75.0, 100.0, 150.0] {
        let mut c = cfg.clone();
        c.h_u = h_u;
        let m = AnalyticModel::new(c).unwrap();
        let t = std::time::Instant::now();
        let a_ll = m.assoc_prob(uavnet::assoc::AuCase::CompLL).unwrap().value;
        let cov = m.coverage_total_au(1.0).unwrap().value;
        let tot = m.rate_totals().unwrap();
        println!(
            "  h_u {h_u:>5}: A_LL {a_ll:.4}  cov@0dB {cov:.4}  R_au {:.4}  R_t {:.4}  [{:?}]",
            tot.r_u_total,
            tot.r_t,
            t.elapsed()
        );
    }

    println!("\ntheta sweep (analytic):");
    for theta_db in [1.0, 2.0, 4.0, 8.0, 16.0, 18.0] {
        let mut c = cfg.clone();
        c.theta = db_to_linear(theta_db);
        let m = AnalyticModel::new(c).unwrap();
        let t = std::time::Instant::now();
        let tot = m.rate_totals().unwrap();
        println!(
            "  theta {theta_db: >4} dB: R_nc {:.4}  R_c {:.4}  R_total {:.4}  [{:?}]",
            tot.r_u_noncomp,
            tot.r_u_comp,
            tot.r_total,
            t.elapsed()
        );
    }
}
