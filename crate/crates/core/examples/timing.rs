//! Wall-clock comparison of the three methods at one dimension.
//!
//! `cargo run --release --example timing -- 5`

use std::time::Instant;

use permuchi::verify::{Engine, Method};

fn main() {
    let n: usize = match std::env::args().nth(1) {
        Some(s) => s.parse().expect("dimension must be a non-negative integer"),
        None => 5,
    };
    let engine = Engine::new();
    println!("{:>3}  {:>14}  {:>14}  {:>14}  terms", "a", "lattice", "localization", "recursion");
    for a in 0..=n {
        let mut cols = Vec::new();
        let mut results = Vec::new();
        for m in Method::ALL {
            let start = Instant::now();
            let p = engine.compute(m, 1, 2, a, n).expect("computation succeeds");
            cols.push(format!("{:>11.3} ms", start.elapsed().as_secs_f64() * 1e3));
            results.push(p);
        }
        assert!(results.windows(2).all(|w| w[0] == w[1]), "methods disagree at a = {a}");
        println!("{a:>3}  {}  {}", cols.join("  "), results[0].len());
    }
}
