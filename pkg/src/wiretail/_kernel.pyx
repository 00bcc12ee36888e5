# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=False
"""Compiled integration kernel.

Literal twin of ``_kernel_py.py``: same arithmetic, same operation order.
Compiled with -ffp-contract=off so results match the Python twin bit for
bit.  Any change here must be mirrored there.
"""

from libc.math cimport asin, cos, fabs, sin, sqrt

BACKEND = "compiled"

P_OMEGA = 0
P_CRANK = 1
P_REEL = 2
P_LT1 = 3
P_LC1 = 4
P_LC2 = 5
P_MU1 = 6
P_MU2 = 7
P_I1 = 8
P_I2 = 9
P_K2 = 10
P_RHO = 11
P_CF1 = 12
P_CD1 = 13
P_CF2 = 14
P_CD2 = 15
P_SX1 = 16
P_SY1 = 17
P_SX2 = 18
P_SY2 = 19
P_MA1 = 20
P_MA2 = 21
P_M1 = 22
P_M2 = 23
N_PARAMS = 24

R_Q2 = 0
R_DQ2 = 1
R_DDQ2 = 2
R_TAU_J1 = 3
R_THRUST = 4
R_FCR = 5
R_PDRAG = 6
R_EKIN = 7
R_EPES = 8
N_RECORD = 9

cdef double CHORD_CUTOFF = 1e-4

cdef int _P_OMEGA = 0, _P_CRANK = 1, _P_REEL = 2, _P_LT1 = 3, _P_LC1 = 4, _P_LC2 = 5
cdef int _P_MU1 = 6, _P_MU2 = 7, _P_I1 = 8, _P_I2 = 9, _P_K2 = 10, _P_RHO = 11
cdef int _P_CF1 = 12, _P_CD1 = 13, _P_CF2 = 14, _P_CD2 = 15
cdef int _P_SX1 = 16, _P_SY1 = 17, _P_SX2 = 18, _P_SY2 = 19
cdef int _P_MA1 = 20, _P_MA2 = 21, _P_M1 = 22, _P_M2 = 23
cdef int _N_PARAMS = 24


cdef double _rhs(const double* par, double t, double q2, double dq2) noexcept nogil:
    cdef double omega = par[_P_OMEGA]
    cdef double a = par[_P_CRANK]
    cdef double gr = par[_P_REEL]
    cdef double lt1 = par[_P_LT1]
    cdef double lc2 = par[_P_LC2]
    cdef double mu2 = par[_P_MU2]
    cdef double i2 = par[_P_I2]

    cdef double phim = omega * t
    cdef double sm = sin(phim)
    cdef double cm = cos(phim)
    cdef double u = a * sm
    cdef double w2 = 1.0 - u * u
    cdef double w = sqrt(w2)
    cdef double dphid = a * omega * cm / w
    cdef double ddphid = -a * omega * omega * sm / w + a * a * omega * omega * cm * cm * u / (w2 * w)
    cdef double beta = gr * asin(u)
    cdef double dbeta = gr * dphid
    cdef double ddbeta = gr * ddphid
    cdef double q1 = 0.5 * beta
    cdef double dq1 = 0.5 * dbeta
    cdef double ddq1 = 0.5 * ddbeta

    cdef double b2, g, gp, gpp, sb, cb
    if beta < CHORD_CUTOFF and beta > -CHORD_CUTOFF:
        b2 = beta * beta
        g = 1.0 - b2 / 24.0 + b2 * b2 / 1920.0
        gp = -beta / 12.0 + beta * b2 / 480.0
        gpp = -1.0 / 12.0 + b2 / 160.0
    else:
        sb = sin(0.5 * beta)
        cb = cos(0.5 * beta)
        g = 2.0 * sb / beta
        gp = cb / beta - 2.0 * sb / (beta * beta)
        gpp = -sb / (2.0 * beta) - 2.0 * cb / (beta * beta) + 4.0 * sb / (beta * beta * beta)
    cdef double l1 = lt1 * g
    cdef double dl1 = lt1 * gp * dbeta
    cdef double ddl1 = lt1 * (gpp * dbeta * dbeta + gp * ddbeta)

    cdef double s1 = sin(q1)
    cdef double c1 = cos(q1)
    cdef double th2 = q1 + q2
    cdef double s12 = sin(th2)
    cdef double c12 = cos(th2)
    cdef double s2 = sin(q2)
    cdef double c2 = cos(q2)
    cdef double dth2 = dq1 + dq2

    cdef double amu = mu2 * l1 * lc2
    cdef double m12 = mu2 * lc2 * lc2 + amu * c2 + i2
    cdef double m22 = mu2 * lc2 * lc2 + i2

    cdef double v2x = -l1 * s1 * dq1 - lc2 * s12 * dth2 + dl1 * c1
    cdef double v2y = l1 * c1 * dq1 + lc2 * c12 * dth2 + dl1 * s1

    cdef double u2x = c12 * v2x + s12 * v2y
    cdef double u2y = -s12 * v2x + c12 * v2y

    cdef double rho = par[_P_RHO]
    cdef double f2xl = -0.5 * rho * par[_P_CF2] * par[_P_SX2] * u2x * fabs(u2x)
    cdef double f2yl = -0.5 * rho * par[_P_CD2] * par[_P_SY2] * u2y * fabs(u2y)

    cdef double fd2x = c12 * f2xl - s12 * f2yl
    cdef double fd2y = s12 * f2xl + c12 * f2yl

    cdef double ox = l1 * c1
    cdef double oy = l1 * s1
    cdef double r2x = ox + lc2 * c12
    cdef double r2y = oy + lc2 * s12
    cdef double taud2 = (r2x - ox) * fd2y - (r2y - oy) * fd2x

    cdef double adot = mu2 * dl1 * lc2
    cdef double h2 = amu * s2 * dq1 * dq1 + 2.0 * adot * c2 * dq1 - mu2 * lc2 * ddl1 * s2
    cdef double ths = q2 - q1
    return (taud2 - par[_P_K2] * ths - h2 - m12 * ddq1) / m22


cdef void _full(const double* par, double t, double q2, double dq2, double* res) noexcept nogil:
    cdef double omega = par[_P_OMEGA]
    cdef double a = par[_P_CRANK]
    cdef double gr = par[_P_REEL]
    cdef double lt1 = par[_P_LT1]
    cdef double lc1 = par[_P_LC1]
    cdef double lc2 = par[_P_LC2]
    cdef double mu1 = par[_P_MU1]
    cdef double mu2 = par[_P_MU2]
    cdef double i1 = par[_P_I1]
    cdef double i2 = par[_P_I2]

    cdef double phim = omega * t
    cdef double sm = sin(phim)
    cdef double cm = cos(phim)
    cdef double u = a * sm
    cdef double w2 = 1.0 - u * u
    cdef double w = sqrt(w2)
    cdef double dphid = a * omega * cm / w
    cdef double ddphid = -a * omega * omega * sm / w + a * a * omega * omega * cm * cm * u / (w2 * w)
    cdef double beta = gr * asin(u)
    cdef double dbeta = gr * dphid
    cdef double ddbeta = gr * ddphid
    cdef double q1 = 0.5 * beta
    cdef double dq1 = 0.5 * dbeta
    cdef double ddq1 = 0.5 * ddbeta

    cdef double b2, g, gp, gpp, sb, cb
    if beta < CHORD_CUTOFF and beta > -CHORD_CUTOFF:
        b2 = beta * beta
        g = 1.0 - b2 / 24.0 + b2 * b2 / 1920.0
        gp = -beta / 12.0 + beta * b2 / 480.0
        gpp = -1.0 / 12.0 + b2 / 160.0
    else:
        sb = sin(0.5 * beta)
        cb = cos(0.5 * beta)
        g = 2.0 * sb / beta
        gp = cb / beta - 2.0 * sb / (beta * beta)
        gpp = -sb / (2.0 * beta) - 2.0 * cb / (beta * beta) + 4.0 * sb / (beta * beta * beta)
    cdef double l1 = lt1 * g
    cdef double dl1 = lt1 * gp * dbeta
    cdef double ddl1 = lt1 * (gpp * dbeta * dbeta + gp * ddbeta)

    cdef double s1 = sin(q1)
    cdef double c1 = cos(q1)
    cdef double th2 = q1 + q2
    cdef double s12 = sin(th2)
    cdef double c12 = cos(th2)
    cdef double s2 = sin(q2)
    cdef double c2 = cos(q2)
    cdef double dth2 = dq1 + dq2

    cdef double amu = mu2 * l1 * lc2
    cdef double m11 = mu1 * lc1 * lc1 + i1 + mu2 * (l1 * l1 + lc2 * lc2) + 2.0 * amu * c2 + i2
    cdef double m12 = mu2 * lc2 * lc2 + amu * c2 + i2
    cdef double m22 = mu2 * lc2 * lc2 + i2

    cdef double v1x = -lc1 * s1 * dq1
    cdef double v1y = lc1 * c1 * dq1
    cdef double v2x = -l1 * s1 * dq1 - lc2 * s12 * dth2 + dl1 * c1
    cdef double v2y = l1 * c1 * dq1 + lc2 * c12 * dth2 + dl1 * s1

    cdef double u1x = c1 * v1x + s1 * v1y
    cdef double u1y = -s1 * v1x + c1 * v1y
    cdef double u2x = c12 * v2x + s12 * v2y
    cdef double u2y = -s12 * v2x + c12 * v2y

    cdef double rho = par[_P_RHO]
    cdef double f1xl = -0.5 * rho * par[_P_CF1] * (par[_P_SX1] * g) * u1x * fabs(u1x)
    cdef double f1yl = -0.5 * rho * par[_P_CD1] * (par[_P_SY1] * g) * u1y * fabs(u1y)
    cdef double f2xl = -0.5 * rho * par[_P_CF2] * par[_P_SX2] * u2x * fabs(u2x)
    cdef double f2yl = -0.5 * rho * par[_P_CD2] * par[_P_SY2] * u2y * fabs(u2y)

    cdef double fd1x = c1 * f1xl - s1 * f1yl
    cdef double fd1y = s1 * f1xl + c1 * f1yl
    cdef double fd2x = c12 * f2xl - s12 * f2yl
    cdef double fd2y = s12 * f2xl + c12 * f2yl

    cdef double r1x = lc1 * c1
    cdef double r1y = lc1 * s1
    cdef double ox = l1 * c1
    cdef double oy = l1 * s1
    cdef double r2x = ox + lc2 * c12
    cdef double r2y = oy + lc2 * s12
    cdef double taud1 = r1x * fd1y - r1y * fd1x + r2x * fd2y - r2y * fd2x
    cdef double taud2 = (r2x - ox) * fd2y - (r2y - oy) * fd2x

    cdef double adot = mu2 * dl1 * lc2
    cdef double h1 = (-2.0 * amu * s2 * dq1 * dq2 - amu * s2 * dq2 * dq2
                      + 2.0 * mu2 * l1 * dl1 * dq1 + 2.0 * adot * c2 * dq1 - mu2 * lc2 * ddl1 * s2)
    cdef double h2 = amu * s2 * dq1 * dq1 + 2.0 * adot * c2 * dq1 - mu2 * lc2 * ddl1 * s2
    cdef double ths = q2 - q1
    cdef double spring = par[_P_K2] * ths

    cdef double ddq2 = (taud2 - spring - h2 - m12 * ddq1) / m22
    cdef double tau_j1 = m11 * ddq1 + m12 * ddq2 + h1 - spring - taud1

    cdef double ddth2 = ddq1 + ddq2
    cdef double a1x = -lc1 * (c1 * dq1 * dq1 + s1 * ddq1)
    cdef double a1y = lc1 * (c1 * ddq1 - s1 * dq1 * dq1)
    cdef double a2x = (-l1 * s1 * ddq1 - l1 * c1 * dq1 * dq1 - lc2 * (s12 * ddth2 + c12 * dth2 * dth2)
                       + ddl1 * c1 - 2.0 * dl1 * s1 * dq1)
    cdef double a2y = (l1 * c1 * ddq1 - l1 * s1 * dq1 * dq1 + lc2 * (c12 * ddth2 - s12 * dth2 * dth2)
                       + ddl1 * s1 + 2.0 * dl1 * c1 * dq1)

    cdef double fa1x = -par[_P_MA1] * a1x
    cdef double fa1y = -par[_P_MA1] * a1y
    cdef double fa2x = -par[_P_MA2] * a2x
    cdef double fa2y = -par[_P_MA2] * a2y

    res[0] = ddq2
    res[1] = tau_j1
    res[2] = fa1x + fd1x + fa2x + fd2x
    res[3] = c1 * (fa2x + fd2x) + s1 * (fa2y + fd2y)
    res[4] = fd1x * v1x + fd1y * v1y + fd2x * v2x + fd2y * v2y
    res[5] = 0.5 * (par[_P_M1] * (v1x * v1x + v1y * v1y) + i1 * dq1 * dq1
                    + par[_P_M2] * (v2x * v2x + v2y * v2y) + i2 * dth2 * dth2)
    res[6] = 0.5 * par[_P_K2] * ths * ths


cdef void _step(const double* par, double t, double dt, double* q2, double* dq2) noexcept nogil:
    cdef double q = q2[0]
    cdef double v = dq2[0]
    cdef double k1v = _rhs(par, t, q, v)
    cdef double half = 0.5 * dt
    cdef double th = t + half
    cdef double k2q = v + half * k1v
    cdef double k2v = _rhs(par, th, q + half * v, k2q)
    cdef double k3q = v + half * k2v
    cdef double k3v = _rhs(par, th, q + half * k2q, k3q)
    cdef double te = t + dt
    cdef double k4q = v + dt * k3v
    cdef double k4v = _rhs(par, te, q + dt * k3q, k4q)
    q2[0] = q + dt * (v + 2.0 * k2q + 2.0 * k3q + k4q) / 6.0
    dq2[0] = v + dt * (k1v + 2.0 * k2v + 2.0 * k3v + k4v) / 6.0


def eval_full(par, double t, double q2, double dq2):
    """Full state evaluation; see the Python twin for channel order."""
    cdef double cpar[24]
    cdef int i
    for i in range(_N_PARAMS):
        cpar[i] = par[i]
    cdef double res[7]
    _full(cpar, t, q2, dq2, res)
    return (res[0], res[1], res[2], res[3], res[4], res[5], res[6])


def step_once(par, double t, double dt, double q2, double dq2):
    """Public single step; used by the step operation and integrator tests."""
    cdef double cpar[24]
    cdef int i
    for i in range(_N_PARAMS):
        cpar[i] = par[i]
    cdef double q = q2
    cdef double v = dq2
    _step(cpar, t, dt, &q, &v)
    return q, v


def run_cycle(par, long n0, double dt, long spc, double q2, double dq2):
    """Integrate one cycle; returns (q2, dq2, rms of q2 over the cycle)."""
    cdef double cpar[24]
    cdef int i
    for i in range(_N_PARAMS):
        cpar[i] = par[i]
    cdef double acc = 0.0
    cdef double t
    cdef double q = q2
    cdef double v = dq2
    cdef long k
    with nogil:
        for k in range(spc):
            t = (n0 + k) * dt
            acc += q * q
            _step(cpar, t, dt, &q, &v)
    return q, v, sqrt(acc / spc)


def run_recorded(par, long n0, double dt, long spc, long n_cycles,
                 double q2, double dq2, double[:, ::1] out):
    """Integrate n_cycles cycles recording all channels; returns (q2, dq2)."""
    cdef double cpar[24]
    cdef int i
    for i in range(_N_PARAMS):
        cpar[i] = par[i]
    cdef long n = spc * n_cycles
    cdef double t
    cdef double q = q2
    cdef double v = dq2
    cdef double res[7]
    cdef long k
    with nogil:
        for k in range(n):
            t = (n0 + k) * dt
            _full(cpar, t, q, v, res)
            out[0, k] = q
            out[1, k] = v
            out[2, k] = res[0]
            out[3, k] = res[1]
            out[4, k] = res[2]
            out[5, k] = res[3]
            out[6, k] = res[4]
            out[7, k] = res[5]
            out[8, k] = res[6]
            _step(cpar, t, dt, &q, &v)
    return q, v
