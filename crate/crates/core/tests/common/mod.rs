#![allow(dead_code)]

use kempe_core::elementary::*;
use kempe_core::geom::{Disk, Point};
use kempe_core::FunctionalLinkage;

pub fn p(re: f64, im: f64) -> Point {
    Point::new(re, im)
}

pub fn disk(re: f64, im: f64, r: f64) -> Disk {
    Disk::new(p(re, im), r)
}

pub type Oracle = fn(&[Point]) -> Vec<Point>;

pub struct Block {
    pub name: &'static str,
    pub linkage: FunctionalLinkage,
    pub f: Oracle,
}

fn block(name: &'static str, linkage: FunctionalLinkage, f: Oracle) -> Block {
    Block { name, linkage, f }
}

/// Every elementary block, certified on a representative ball.
pub fn blocks() -> Vec<Block> {
    let d = disk(0.0, 0.0, 1.0);
    vec![
        block("translator fwd", make_translator(p(1.0, 0.0), Direction::Fwd, disk(1.0, 0.0, 0.5)).unwrap(), |x| vec![x[0] + 1.0]),
        block("translator bwd", make_translator(p(1.0, 0.0), Direction::Bwd, disk(2.0, 0.0, 0.5)).unwrap(), |x| vec![x[0] - 1.0]),
        block("pantograph scale 2", make_pantograph(PantographMode::Scale(2.0), d).unwrap(), |x| vec![x[0] * 2.0]),
        block("pantograph div 2", make_pantograph(PantographMode::Div(2.0), d).unwrap(), |x| vec![x[0] / 2.0]),
        block("pantograph negate", make_pantograph(PantographMode::Negate, d).unwrap(), |x| vec![-x[0]]),
        block("adder", make_adder(d, d).unwrap(), |x| vec![x[0] + x[1]]),
        block("inversor t=1", make_inversor(1.0, disk(2.0, 0.0, 0.5)).unwrap(), |x| vec![1.0 / x[0].conj()]),
        block("squarer", make_squarer(d).unwrap(), |x| vec![x[0] * x[0]]),
        block("multiplier", make_multiplier(&[d, d]).unwrap(), |x| vec![x[0] * x[1]]),
        block("straight line m=1", make_straight_line(1, 1.0).unwrap(), |x| x.to_vec()),
        block("straight line m=2", make_straight_line(2, 1.0).unwrap(), |x| x.to_vec()),
        block("conjugator", make_conjugator(d).unwrap(), |x| vec![x[0].conj()]),
    ]
}
