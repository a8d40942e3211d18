pub mod activity;
pub mod design;
pub mod response;
pub mod tree_verify;
