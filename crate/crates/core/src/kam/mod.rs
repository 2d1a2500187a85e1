//! KAM engine (under construction).
