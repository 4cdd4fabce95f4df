//! Pulling a function back along a blowup, descending it again, and a class
//! on the blowup that does not descend.

use pexp::corpus;
use pexp::fan::stellar_subdivision;
use pexp::lattice::{Character, LatticePoint};
use pexp::pexp::{CartierData, PExpFun};

fn main() {
    let fan = corpus::p2();
    let blowup = stellar_subdivision(&fan, &LatticePoint::from_i64(&[1, 1])).unwrap();
    println!("blowup: {} maximal cones, assignment {:?}", blowup.fine.max_cones().len(), blowup.assignment);

    let m = |c: &[i64]| Character::from_i64(c);
    let h = PExpFun::from_cartier(&fan, &CartierData::new(vec![m(&[0, 0]), m(&[1, 0]), m(&[0, 1])])).unwrap();
    let up = h.pullback(&blowup).unwrap();
    println!("pulled back: {:?}", up.values());
    println!("descends to the original: {}", up.descend(&blowup).unwrap() == h);

    let rays: Vec<num_bigint::BigInt> = (0..4).map(|r| i64::from(r == 3).into()).collect();
    let e = PExpFun::from_cartier(&blowup.fine, &CartierData::from_ray_values(&blowup.fine, &rays).unwrap()).unwrap();
    match e.descend(&blowup) {
        Ok(_) => println!("exceptional class descended (unexpected)"),
        Err(err) => println!("exceptional class: {err}"),
    }
}
