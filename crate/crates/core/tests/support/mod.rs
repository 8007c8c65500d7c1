//! Independent reference implementations shared by the integration suites.
#![allow(dead_code)]

pub mod expm;
pub mod master;
pub mod quadrature;
pub mod split_step;
