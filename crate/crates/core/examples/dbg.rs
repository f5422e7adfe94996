use apsis_core::bozis::pq_sample;
use apsis_core::families::FamilySpec;

fn main() {
    let spec = FamilySpec::by_eccentricity(1.0, 1.0).unwrap();
    for (r, theta, w) in [
        (1.2, 0.9, 0.3),
        (0.8, 0.5, 0.0),
        (1.9, 1.1, 0.6),
        (2.5, 0.35, 0.15),
    ] {
        let (x, y) = (r * f64::cos(theta), r * f64::sin(theta));
        match pq_sample(&spec, x, y, w) {
            Ok(s) => {
                let r2: f64 = x * x + y * y;
                println!(
                    "r={r} th={theta} w={w}: P={:.12e} want {:.12e} | Q={:.12e} want {:.12e} | rho={:.12e} want {:.12e}",
                    s.p, 1.0 / x - 3.0 * x / r2, s.q, -3.0 * y / r2, s.rho, y / x
                );
            }
            Err(e) => println!("r={r} th={theta} w={w}: ERR {e}"),
        }
    }
}
