//! Measures packer cost curves: balls and time needed to reach a given
//! uncovered fraction for the two region shapes the construction uses.

use std::time::Instant;
use wqr::geom::{Ball, BoxDomain, Point, Region};
use wqr::packing::{pack, PackOptions};

fn run(label: &str, region: &Region, delta_max: f64, etas: &[f64], max_balls: usize) {
    for &eta in etas {
        let opts = PackOptions {
            max_balls,
            mc_samples: 0,
            min_radius_rel: 1e-6,
            ..PackOptions::default()
        };
        let t0 = Instant::now();
        let p = pack(region, delta_max, eta, None, 0, &opts).unwrap();
        println!(
            "{label} eta={eta:<5} -> balls={:>8} uncovered={:.4} status={:?} time={:.2?}",
            p.balls.len(),
            p.uncovered_exact,
            p.status,
            t0.elapsed()
        );
    }
}

fn main() {
    let cube = Region::Box(BoxDomain::unit_cube(3));
    let ball = Region::Ball(Ball::new(Point::zeros(3), 1.0).unwrap());

    println!("--- unit cube, delta_max = 0.159 (inradius-scale schedule) ---");
    run("cube d=0.159", &cube, 0.159, &[0.3, 0.2, 0.1, 0.05], 2_000_000);

    println!("--- unit cube, delta_max = 0.0398 (inradius/4 schedule) ---");
    run("cube d=0.0398", &cube, 0.0398, &[0.3, 0.2, 0.1], 2_000_000);

    println!("--- unit ball, delta_max = 0.636R (child packing shape) ---");
    run("ball d=0.636", &ball, 0.636, &[0.3, 0.2, 0.1, 0.05], 2_000_000);

    println!("--- unit ball, delta_max = R (single inscribed) ---");
    run("ball d=1", &ball, 1.0, &[0.05], 10_000);
}
