//! Holds the `acceptance` test target, which runs every criterion of
//! [`coconvex::verify`] at full size. Run it alone with
//! `cargo test -p coconvex-suite --test acceptance`.
