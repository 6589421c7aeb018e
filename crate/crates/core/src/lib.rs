pub mod exp;
pub mod ff;
pub mod frob;
pub mod groups;
pub mod mpoly;
pub mod poly;
pub mod rng;
pub mod selftest;
pub mod stats;
