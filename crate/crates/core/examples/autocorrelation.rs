//! Random-walk autocorrelation of OneMax against the closed form
//! r(s) = (1 - 2/n)^s.

use memetic_lab::functions::OneMax;
use memetic_lab::stategraph::autocorrelation;
use memetic_lab::RngStream;

fn main() {
    let n = 50;
    let a = autocorrelation(&OneMax::new(n), 200_000, 8, &mut RngStream::new(3)).unwrap();
    for (s, r) in a.r.iter().enumerate() {
        println!("lag {s}: {r:.4} (exact {:.4})", (1.0 - 2.0 / n as f64).powi(s as i32));
    }
    println!("correlation length {:.2} (exact {:.2})", a.correlation_length.unwrap(), -1.0 / (1.0 - 2.0 / n as f64).ln());
}
