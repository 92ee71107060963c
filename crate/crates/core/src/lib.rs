pub mod dehn;
pub mod error;
pub mod fourier;
pub mod graph;
pub mod independence;
pub mod moduli;
pub mod route;
pub mod su2;
pub mod trace;
pub mod tol;
