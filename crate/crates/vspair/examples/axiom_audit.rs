//! Bounded constructive checks of the pair axioms on the term model:
//! freeness of the module over independent scalars, density of rG, the
//! codensity of fresh directions, and the half-graph coset probe.
//!
//! ```sh
//! cargo run --example axiom_audit
//! ```

use vspair::config::EngineConfig;
use vspair::model::{check_axioms, halfgraph_probe, CheckBounds, ModelHandle};

fn main() {
    for (name, cfg) in [
        ("Q / Z", EngineConfig::rationals_integers()),
        (
            "Q(a), a^2 = 2 / Z",
            EngineConfig::parse("field = a^2 - 2\nring = integers\nroot_index = 1").unwrap(),
        ),
        (
            "Q ordered / Z",
            EngineConfig::parse("ordered = true").unwrap(),
        ),
    ] {
        let mut model = ModelHandle::new(cfg.field.clone(), cfg.ring.clone());
        let bounds = CheckBounds { samples: 2000, ..Default::default() };
        let report = check_axioms(&mut model, &bounds).unwrap();
        println!("{name}:");
        println!(
            "  freeness: {} samples, {} violations",
            report.freeness_samples, report.freeness_violations
        );
        println!(
            "  density witnesses: {}/{}",
            report.density_passes, report.density_samples
        );
        println!(
            "  codensity witnesses: {}/{}",
            report.codensity_passes, report.codensity_samples
        );
    }

    let cfg = EngineConfig::rationals_integers();
    let mut model = ModelHandle::new(cfg.field.clone(), cfg.ring.clone());
    let report = halfgraph_probe(&mut model, 10_000, 7);
    println!(
        "\nhalf-graph coset probe: {} quadruples, {} hypothesis hits, {} violations",
        report.samples, report.hypothesis_hits, report.violations
    );
}
