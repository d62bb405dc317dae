//! Closed forms of the rotated-frame coupling coefficients.
//!
//! Nine instantaneous entries xi_{aa'}(t) (first index: even sublattice,
//! second: odd) and nine period averages. These are long trigonometric
//! expressions; the conjugation and quadrature oracles in the test suite
//! check every entry against frame rotations computed from first
//! principles, so any transcription slip fails loudly.

/// Trigonometric shorthands shared by all entries.
#[derive(Debug, Clone, Copy)]
pub(super) struct Angles {
    pub se: f64,
    pub ce: f64,
    pub so: f64,
    pub co: f64,
    pub spe: f64,
    pub cpe: f64,
    pub spo: f64,
    pub cpo: f64,
    /// sin(phi_e - phi_o)
    pub sd: f64,
    /// cos(phi_e - phi_o)
    pub cd: f64,
    pub s2pe: f64,
    pub s2po: f64,
    pub c2pe: f64,
    pub c2po: f64,
    pub c2te: f64,
    pub c2to: f64,
    pub s2te: f64,
    pub s2to: f64,
}

impl Angles {
    pub fn new(theta_e: f64, phi_e: f64, theta_o: f64, phi_o: f64) -> Self {
        Self {
            se: theta_e.sin(),
            ce: theta_e.cos(),
            so: theta_o.sin(),
            co: theta_o.cos(),
            spe: phi_e.sin(),
            cpe: phi_e.cos(),
            spo: phi_o.sin(),
            cpo: phi_o.cos(),
            sd: (phi_e - phi_o).sin(),
            cd: (phi_e - phi_o).cos(),
            s2pe: (2.0 * phi_e).sin(),
            s2po: (2.0 * phi_o).sin(),
            c2pe: (2.0 * phi_e).cos(),
            c2po: (2.0 * phi_o).cos(),
            c2te: (2.0 * theta_e).cos(),
            c2to: (2.0 * theta_o).cos(),
            s2te: (2.0 * theta_e).sin(),
            s2to: (2.0 * theta_o).sin(),
        }
    }
}

/// Rotation phases g_e(t), g_o(t) and their derived quantities.
#[derive(Debug, Clone, Copy)]
pub(super) struct Phases {
    pub cge: f64,
    pub sge: f64,
    pub cgo: f64,
    pub sgo: f64,
    /// sin^2(g_e / 2)
    pub shge2: f64,
    /// sin^2(g_o / 2)
    pub shgo2: f64,
}

impl Phases {
    pub fn new(ge: f64, go: f64) -> Self {
        Self {
            cge: ge.cos(),
            sge: ge.sin(),
            cgo: go.cos(),
            sgo: go.sin(),
            shge2: (ge / 2.0).sin().powi(2),
            shgo2: (go / 2.0).sin().powi(2),
        }
    }
}

pub(super) fn xi_xx(a: &Angles, p: &Phases) -> f64 {
    a.se * a.se * a.cpe
        * (p.cgo * a.co * a.co * a.cpo * a.cd
            - a.spe * p.sgo * a.co
            - p.cgo * a.spo * a.sd
            + a.so * a.so * a.cpo * a.cd)
        + p.cge
            * (p.cgo
                * (a.co * a.co * a.cpo * (a.ce * a.ce * a.cpe * a.cd + a.spe * a.sd)
                    + a.spo * (a.spe * a.cd - a.ce * a.ce * a.cpe * a.sd))
                + a.se * a.se * a.spe * a.cpe * p.sgo * a.co
                + a.ce * a.ce * a.cpe * a.so * a.so * a.cpo * a.cd
                + a.spe * a.so * a.so * a.cpo * a.sd)
        + p.sge * a.ce * (p.sgo * a.co - p.shgo2 * a.so * a.so * a.s2po)
}

pub(super) fn xi_yy(a: &Angles, p: &Phases) -> f64 {
    a.se * a.se * a.spe
        * (a.spo * a.cd * (p.cgo * a.co * a.co + a.so * a.so)
            + a.cpe * p.sgo * a.co
            + p.cgo * a.cpo * a.sd)
        + p.cge
            * (p.cgo
                * (a.cpe * a.cpe * (a.co * a.co * a.spo * a.spo + a.cpo * a.cpo)
                    + a.ce * a.ce * a.spe * (a.co * a.co * a.spo * a.cd + a.cpo * a.sd)
                    + a.spe * a.cpe * a.so * a.so * a.spo * a.cpo)
                - a.se * a.se * a.spe * a.cpe * p.sgo * a.co
                + a.so * a.so * a.spo * (a.ce * a.ce * a.spe * a.cd - a.cpe * a.sd))
        + p.sge * a.ce * (p.sgo * a.co + p.shgo2 * a.so * a.so * a.s2po)
}

pub(super) fn xi_zz(a: &Angles, p: &Phases) -> f64 {
    a.se * a.so
        * (a.cd * (p.sge * p.sgo + 2.0 * (1.0 - p.cge) * a.ce * p.shgo2 * a.co)
            + a.sd * ((1.0 - p.cge) * a.ce * p.sgo - 2.0 * p.sge * p.shgo2 * a.co))
}

pub(super) fn xi_xy(a: &Angles, p: &Phases) -> f64 {
    a.so * a.so * a.spo
        * (p.cge * (a.ce * a.ce * a.cpe * a.cd + a.spe * a.sd) + a.se * a.se * a.cpe * a.cpe * a.cpo)
        + a.spo * a.spo
            * (a.se * a.se * a.cpe * a.cpe * p.sgo * a.co
                + 0.5 * a.so * a.so * (a.se * a.se * a.s2pe - 2.0 * p.sge * a.ce))
        + p.sgo * a.co
            * (a.cpe * a.cpe * (p.cge * a.ce * a.ce + a.se * a.se * a.cpo * a.cpo)
                + p.cge * a.spe * a.spe)
        + 0.25
            * p.cgo
            * (4.0 * p.cge * a.ce * a.ce * a.cpe * a.cpo
                * (a.spe * a.cpo - a.cpe * a.so * a.so * a.spo)
                + 4.0 * p.shge2 * a.se * a.se * a.s2pe * a.co * a.co * a.spo * a.spo
                + 4.0 * a.spe * a.cpe * a.cpo * a.cpo * (a.se * a.se - p.cge)
                - 4.0 * a.so * a.so * a.spo * a.cpo
                    * (p.cge * a.spe * a.spe + a.se * a.se * a.cpe * a.cpe)
                - p.sge * a.ce * (2.0 * a.so * a.so * a.c2po + a.c2to + 3.0))
}

pub(super) fn xi_yx(a: &Angles, p: &Phases) -> f64 {
    0.125
        * (8.0 * p.sge * a.ce * a.so * a.so * a.cpo * a.cpo
            + 8.0 * p.cge * a.so * a.so * a.spo * a.cpo
                * (a.ce * a.ce * a.spe * a.spe + a.cpe * a.cpe)
            + 2.0 * p.cgo
                * (4.0 * a.co * a.co * a.cpo
                    * (a.se * a.se * a.spe * a.cd - p.cge * a.cpe * a.sd)
                    + 4.0 * p.cge * a.ce * a.ce * a.spe
                        * (a.co * a.co * a.cpo * a.cd - a.spo * a.sd)
                    + p.sge * a.ce * (-2.0 * a.so * a.so * a.c2po + a.c2to + 3.0)
                    - 4.0 * a.spo * (p.cge * a.cpe * a.cd + a.se * a.se * a.spe * a.sd))
            + 8.0 * a.se * a.se * a.spe * a.so * a.so * a.cpo * (a.cd - p.cge * a.cpe * a.cpo)
            - 8.0 * a.se * a.se * a.spe * a.spe * p.sgo * a.co
            - 2.0 * p.cge * p.sgo * a.co * (2.0 * a.se * a.se * a.c2pe + a.c2te + 3.0))
}

pub(super) fn xi_yz(a: &Angles, p: &Phases) -> f64 {
    a.so * (p.cge * a.ce * a.ce * a.spe * (2.0 * p.shgo2 * a.co * a.cd + p.sgo * a.sd)
        + p.sge * a.ce * (2.0 * p.shgo2 * a.co * a.cpo - p.sgo * a.spo)
        + a.cd * (2.0 * a.se * a.se * a.spe * p.shgo2 * a.co + p.cge * a.cpe * p.sgo)
        + a.sd * (a.se * a.se * a.spe * p.sgo - 2.0 * p.cge * a.cpe * p.shgo2 * a.co))
}

pub(super) fn xi_zy(a: &Angles, p: &Phases) -> f64 {
    a.se * (p.cgo
        * (p.sge * a.cpe * (a.co * a.co * a.spo * a.spo + a.cpo * a.cpo)
            - (p.cge - 1.0) * a.ce * (a.co * a.co * a.spo * a.cd + a.cpo * a.sd)
            + p.sge * a.spe * a.so * a.so * a.spo * a.cpo)
        - a.so * a.so * a.spo * ((p.cge - 1.0) * a.ce * a.cd + p.sge * a.sd)
        - p.sgo * a.co * ((p.cge - 1.0) * a.ce * a.cpe + p.sge * a.spe))
}

pub(super) fn xi_xz(a: &Angles, p: &Phases) -> f64 {
    a.so * (p.cge
        * (a.cd * (2.0 * a.ce * a.ce * a.cpe * p.shgo2 * a.co - a.spe * p.sgo)
            + a.sd * (2.0 * a.spe * p.shgo2 * a.co + a.ce * a.ce * a.cpe * p.sgo))
        + a.se * a.se * a.cpe * (2.0 * p.shgo2 * a.co * a.cd + p.sgo * a.sd)
        - p.sge * a.ce * (2.0 * p.shgo2 * a.co * a.spo + p.sgo * a.cpo))
}

pub(super) fn xi_zx(a: &Angles, p: &Phases) -> f64 {
    a.se * (a.so * a.so * a.cpo * (2.0 * p.shge2 * a.ce * a.cd - p.sge * a.sd)
        - p.cgo
            * (p.sge * (a.co * a.co * a.cpo * a.sd + a.spo * a.cd)
                + (p.cge - 1.0) * a.ce * (a.co * a.co * a.cpo * a.cd - a.spo * a.sd))
        - p.sgo * a.co * (p.sge * a.cpe - (p.cge - 1.0) * a.ce * a.spe))
}

/// Bessel J0 values entering the period averages.
#[derive(Debug, Clone, Copy)]
pub(super) struct BesselSet {
    /// J0(chi_e)
    pub je: f64,
    /// J0(chi_o)
    pub jo: f64,
    /// J0(chi_e + chi_o)
    pub jp: f64,
    /// J0(chi_e - chi_o)
    pub jm: f64,
}

pub(super) fn xi_bar_xx(a: &Angles, b: &BesselSet) -> f64 {
    (a.se * a.se * a.cpe * b.jo * (a.co * a.co * a.cpo * a.cd - a.spo * a.sd)
        + a.so * a.so * a.cpo
            * (b.je * (a.ce * a.ce * a.cpe * a.cd + a.spe * a.sd) + a.se * a.se * a.cpe * a.cd))
        + 0.5 * b.jp
            * (a.ce * a.ce * a.cpe * (a.co * a.co * a.cpo * a.cd - a.spo * a.sd)
                + a.spe * (a.co * a.co * a.cpo * a.sd + a.spo * a.cd)
                - a.ce * a.co)
        + 0.5 * b.jm
            * (a.ce * a.ce * a.cpe * (a.co * a.co * a.cpo * a.cd - a.spo * a.sd)
                + a.spe * (a.co * a.co * a.cpo * a.sd + a.spo * a.cd)
                + a.ce * a.co)
}

pub(super) fn xi_bar_yy(a: &Angles, b: &BesselSet) -> f64 {
    (a.se * a.se * a.spe * b.jo * (a.co * a.co * a.spo * a.cd + a.cpo * a.sd)
        + a.so * a.so * a.spo
            * (a.spe * a.cd * (a.ce * a.ce * b.je + a.se * a.se) - b.je * a.cpe * a.sd))
        + 0.5 * b.jp
            * (a.cpe
                * (a.cpe * (a.co * a.co * a.spo * a.spo + a.cpo * a.cpo)
                    + a.spe * a.so * a.so * a.spo * a.cpo)
                + a.ce * a.ce * a.spe * (a.co * a.co * a.spo * a.cd + a.cpo * a.sd)
                - a.ce * a.co)
        + 0.5 * b.jm
            * (a.cpe
                * (a.cpe * (a.co * a.co * a.spo * a.spo + a.cpo * a.cpo)
                    + a.spe * a.so * a.so * a.spo * a.cpo)
                + a.ce * a.ce * a.spe * (a.co * a.co * a.spo * a.cd + a.cpo * a.sd)
                + a.ce * a.co)
}

pub(super) fn xi_bar_zz(a: &Angles, b: &BesselSet) -> f64 {
    0.5 * a.se * a.so * a.cd
        * (2.0 * a.ce * a.co * (1.0 - b.je - b.jo)
            + (a.ce * a.co - 1.0) * b.jp
            + (a.ce * a.co + 1.0) * b.jm)
}

pub(super) fn xi_bar_xy(a: &Angles, b: &BesselSet) -> f64 {
    (1.0 / 16.0)
        * (a.so * a.so * a.s2po
            * (2.0 * a.se * a.se
                * (2.0 - 4.0 * a.cpe * a.cpe * b.jo
                    + a.c2pe * (b.jm + b.jp - 2.0 * b.je + 2.0))
                + (a.c2te + 3.0) * (2.0 * b.je - b.jm - b.jp))
            + a.se * a.se * a.s2pe
                * ((2.0 * b.jo - b.jm - b.jp) * (2.0 * a.so * a.so * a.c2po + a.c2to + 3.0)
                    - 8.0 * (b.je - 1.0) * a.so * a.so * a.spo * a.spo))
}

pub(super) fn xi_bar_yx(a: &Angles, b: &BesselSet) -> f64 {
    0.5 * (a.se * a.se
        * ((1.0 - b.je) * a.s2pe * a.so * a.so * a.cpo * a.cpo
            + 2.0 * a.spe * b.jo * (a.co * a.co * a.cpo * a.cd - a.spo * a.sd))
        + a.so * a.so * a.s2po
            * (a.spe * a.spe * (a.ce * a.ce * b.je + a.se * a.se) + b.je * a.cpe * a.cpe)
        + b.jm
            * (a.ce * a.ce * a.spe * (a.co * a.co * a.cpo * a.cd - a.spo * a.sd)
                - a.cpe * (a.co * a.co * a.cpo * a.sd + a.spo * a.cd))
        + b.jp
            * (a.ce * a.ce * a.spe * (a.co * a.co * a.cpo * a.cd - a.spo * a.sd)
                - a.cpe * (a.co * a.co * a.cpo * a.sd + a.spo * a.cd)))
}

pub(super) fn xi_bar_yz(a: &Angles, b: &BesselSet) -> f64 {
    0.5 * (a.s2to
        * (a.spe * a.cd * (a.ce * a.ce * b.je - a.se * a.se * (b.jo - 1.0))
            - b.je * a.cpe * a.sd)
        - a.so * b.jm
            * (a.ce * a.ce * a.spe * a.co * a.cd + a.ce * a.spo - a.cpe * a.co * a.sd)
        + a.so * b.jp
            * (a.ce * a.spo + a.cpe * a.co * a.sd - a.ce * a.ce * a.spe * a.co * a.cd))
}

pub(super) fn xi_bar_zy(a: &Angles, b: &BesselSet) -> f64 {
    0.5 * a.se
        * (-a.ce * (b.jm + b.jp - 2.0 * b.jo) * (a.co * a.co * a.spo * a.cd + a.cpo * a.sd)
            - 2.0 * a.ce * (b.je - 1.0) * a.so * a.so * a.spo * a.cd
            + a.spe * a.co * (b.jp - b.jm))
}

pub(super) fn xi_bar_xz(a: &Angles, b: &BesselSet) -> f64 {
    0.5 * (a.s2to
        * (a.cpe * a.cd * (a.ce * a.ce * b.je - a.se * a.se * (b.jo - 1.0))
            + b.je * a.spe * a.sd)
        - a.so * b.jp
            * (a.ce * a.ce * a.cpe * a.co * a.cd - a.ce * a.cpo + a.spe * a.co * a.sd)
        - a.so * b.jm
            * (a.ce * (a.ce * a.cpe * a.co * a.cd + a.cpo) + a.spe * a.co * a.sd))
}

pub(super) fn xi_bar_zx(a: &Angles, b: &BesselSet) -> f64 {
    0.5 * (a.s2te
        * (a.cpo * a.cd * (a.co * a.co * b.jo - (b.je - 1.0) * a.so * a.so)
            - b.jo * a.spo * a.sd)
        + a.se * b.jp
            * (a.cpe * a.co + a.ce * a.spo * a.sd - a.ce * a.co * a.co * a.cpo * a.cd)
        - a.se * b.jm
            * (a.co * (a.ce * a.co * a.cpo * a.cd + a.cpe) - a.ce * a.spo * a.sd))
}
