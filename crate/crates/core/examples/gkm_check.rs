//! Validating raw cone values: a genuine function and a corrupted copy.

use pexp::corpus;
use pexp::laurent::LaurentPoly;
use pexp::pexp::{gkm_validate, Validation};

fn main() {
    let fan = corpus::p112();
    let lp = |t: &[(i64, &[i64])]| LaurentPoly::from_terms(2, t);
    let mut values = vec![
        lp(&[(1, &[1, 0]), (1, &[0, 1])]),
        lp(&[(1, &[0, 0]), (1, &[1, -1])]),
        lp(&[(1, &[-2, 1]), (1, &[-1, 0])]),
    ];
    for round in ["original", "corrupted"] {
        match gkm_validate(&fan, values.clone()).unwrap() {
            Validation::Valid(f) => println!("{round}: valid, value on the zero cone {}", f.restrict(&[]).unwrap()),
            Validation::Violations(v) => {
                println!("{round}: {} violation(s)", v.len());
                for x in v {
                    println!("  {x}");
                }
            }
        }
        values[2] = lp(&[(1, &[-2, 1]), (1, &[-1, 1])]);
    }
}
