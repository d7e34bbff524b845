pub mod cache;
pub mod checks;
pub mod dsl;
pub mod engine;
pub mod kernels;
pub mod linalg;
pub mod poly;
pub mod polyfit;
pub mod qmod;
pub mod rational;
pub mod series;
pub mod virasoro;
