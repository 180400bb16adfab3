pub mod classes;
pub mod exec;
pub mod network;
pub mod numerics;
pub mod tightness;
