//! Oscillator application (under construction).
