// Quaternion products in double and exact precision.

use qharm::quaternion::{commutes, qmul, Quaternion};

fn main() {
    let i = Quaternion::pure([1.0, 0.0, 0.0]);
    let j = Quaternion::pure([0.0, 1.0, 0.0]);
    println!("ij = {:?}", qmul(&i, &j));
    println!("ji = {:?}", qmul(&j, &i));

    let p = Quaternion::new(1.0, [2.0, -1.0, 0.5]);
    let q = Quaternion::new(-0.5, [0.0, 3.0, 1.0]);
    let pq = p * q;
    println!("|pq| = {:.15}, |p||q| = {:.15}", pq.modulus(), p.modulus() * q.modulus());
    println!("p commutes with q: {}", commutes(&p, &q, 1e-12));

    // Exact arithmetic: (pq)r = p(qr) with no rounding at all.
    let (pe, qe, re) = (p.to_exact(), q.to_exact(), Quaternion::new(0.25, [1.0, 1.0, -2.0]).to_exact());
    let assoc = qmul(&qmul(&pe, &qe), &re) == qmul(&pe, &qmul(&qe, &re));
    println!("exact associativity: {assoc}");
    assert!(assoc);
}
