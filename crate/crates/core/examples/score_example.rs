//! Flies the bundled example design on the default altitude task and prints
//! the outcome, structural report, cost and reward.
use rocketbench::catalog::Catalog;
use rocketbench::design::RocketDesign;
use rocketbench::harness::TaskSpec;
use rocketbench::pipeline::evaluate;

fn main() {
    let design = RocketDesign::example();
    let eval = evaluate(&design, Catalog::builtin(), &TaskSpec::default().scenario());
    let out = eval.outcome.as_ref().expect("example passes DRC");
    println!("apogee      {:.1} m", out.apogee);
    println!("landing     ({:.1}, {:.1}) m", out.landing_x, out.landing_y);
    println!("impact      {:.2} m/s", out.impact_velocity);
    if let Some(s) = &eval.stress {
        println!(
            "bending     {:.2} MPa, flutter margin {:.3}",
            s.bending_stress / 1e6,
            s.fin_flutter_margin
        );
    }
    if let Some(c) = &eval.cost {
        println!("cost        ${:.2}", c.total_cost);
    }
    println!("reward      {:.4}", eval.reward.total);
    for (k, v) in &eval.reward.components {
        println!("  {k:<28}{v:.4}");
    }
}
