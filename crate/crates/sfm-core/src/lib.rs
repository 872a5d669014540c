pub mod base;
pub mod batch;
pub mod certificate;
pub mod error;
pub mod flow;
pub mod gen;
pub mod instance;
pub mod oracle;
pub mod rational;
pub mod runner;
pub mod scaling;
pub mod selftest;
pub mod strong;
pub mod subset;
pub mod trace;
pub mod verify;
