use wqr::geom::{BoxDomain, Region};
use wqr::packing::{pack, PackOptions};
fn main() {
    eprintln!("start");
    let cube = Region::Box(BoxDomain::unit_cube(3));
    let opts = PackOptions { max_balls: 3_000_000, mc_samples: 0, min_radius_rel: 1e-6 };
    let p = pack(&cube, 0.159, 0.05, None, 0, &opts).unwrap();
    eprintln!("done balls={} uncovered={}", p.balls.len(), p.uncovered_exact);
}
