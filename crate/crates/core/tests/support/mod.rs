#![allow(dead_code)]

pub mod cocycles;
pub mod conjugation;
