pub mod bench;
pub mod bounds;
pub mod certify;
pub mod dd;
pub mod selftest;
