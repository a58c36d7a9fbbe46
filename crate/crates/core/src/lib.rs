pub mod characterize;
pub mod gmi;
pub mod io;
pub mod pipeline;
pub mod nn;
pub mod prune;
pub mod seed;
