pub mod bounds;
pub mod cantor;
pub mod levelset;
pub mod phase;
pub mod selftest;
pub mod witness;
