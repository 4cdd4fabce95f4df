//! Exact division by `1 - e^w` and reduction of a localization sum.

use pexp::lattice::Character;
use pexp::laurent::{LaurentPoly, LocalizationSum};

fn main() {
    let w = Character::from_i64(&[1, -2]);
    let f = LaurentPoly::from_terms(2, &[(3, &[0, 0]), (-1, &[2, 1]), (5, &[-1, 4])]);
    let g = f.mul_one_minus(&w);
    println!("(1 - e^{w}) * ({f}) = {g}");
    println!("divided back: {}", g.divide_exact(&w).unwrap());
    match f.divide_exact(&w) {
        Ok(q) => println!("unexpected quotient {q}"),
        Err(e) => println!("{f} itself: {e}"),
    }

    // O(2) on the projective line, localized at its two fixed points
    let u = Character::from_i64(&[1]);
    let mut sum = LocalizationSum::new(1);
    sum.push(LaurentPoly::one(1), vec![u.clone()]).unwrap();
    sum.push(LaurentPoly::monomial(u.scale(&2.into())), vec![u.neg()]).unwrap();
    println!("1/(1-e^u) + e^(2u)/(1-e^-u) = {}", sum.reduce().unwrap());
}
