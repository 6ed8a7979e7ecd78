"""Independent high-precision reference values used by the C++ test suites."""
import mpmath as mp

mp.mp.dps = 40


def consts(H):
    H = mp.mpf(H)
    a = mp.sqrt(mp.gamma(2 * H + 1) * mp.gamma(3 - 2 * H)) * mp.sin(mp.pi * H) ** 2
    c = a / (2 * H * mp.gamma(1.5 - H) * mp.gamma(H + 0.5))
    psi = mp.gamma(3 - 2 * H) / (c * mp.gamma(1.5 - H) ** 2)
    B = 2 ** (3 - 4 * H) / mp.sin(mp.pi * H) ** 4 * mp.gamma(2 - H) / (mp.gamma(1.5 - H) ** 2 * mp.gamma(H))
    d2 = 1 - 2 * H * mp.gamma(3 - 2 * H) * mp.gamma(H + 0.5) / mp.gamma(1.5 - H)
    return dict(alpha=a, c=c, psi=psi, B=B, d2=d2)


def show(name, v):
    if isinstance(v, mp.mpc):
        print(f"{name} = {mp.nstr(v.real, 17)} {mp.nstr(v.imag, 17)}i")
    else:
        print(f"{name} = {mp.nstr(v, 17)}")


show("gamma(2.2)", mp.gamma(2.2))
show("beta_sym(1.2) by quadrature", mp.quad(lambda t: t ** 0.2 * (1 - t) ** 0.2, [0, 1]))
show("E1(1)", mp.expint(1, 1))
# principal branch of E(0.5, z) = z^{-1/2} Gamma(1/2, z) continued to z = -0.3
show("E(0.5,-0.3)", mp.expint(0.5, mp.mpf(-0.3)))
show("E(0.5,-0.3) via integral", (mp.mpc(-0.3)) ** (-0.5) * (mp.gamma(0.5) - mp.quad(lambda x: x ** -0.5 * mp.exp(-x), [0, mp.mpc(-0.3)])))
for H in (0.3, 0.4):
    for k, v in consts(H).items():
        show(f"H={H} {k}", v)

H, T, kap, sig, V, rho, u, vr, pi = map(mp.mpf, ("0.3", "0.5", "2", "0.3", "5", "-0.5", "1", "1", "0.5"))
C = consts(H)
B = C["B"]
nu = lambda t: B * t ** (H - 0.5)
show("small-param f(0.3,0.5)", 2 / (B * T ** H))
show("p_drift_v(0.5, H=0.3, v=1) imag", H * mp.sqrt(C["d2"]) * mp.mpf(0.5) ** (H - 1))
show("gamma_closed_form(0)", -u * (1 + u * (1 - rho) ** 2) / (4 * kap) * (1 - mp.exp(-2 * kap * T)))
I = mp.quad(lambda s: (kap + vr * s ** pi) / nu(s), [0, T])
show("int_0^T (k+m)/nu", I)
bb0 = 1j * rho * u * (mp.exp(-kap * T) / nu(T) + I)
g0 = -u * (1 + u * (1 - rho) ** 2) / (4 * kap) * (1 - mp.exp(-2 * kap * T))
show("closed-form cf_zero(u=1)", mp.exp(g0 * sig ** 2 + bb0 * sig * V))
a1 = lambda t: mp.exp(vr * (t ** (1 + pi) - T ** (1 + pi)) / (1 + pi))
for t in ("0", "0.1", "0.25", "0.4"):
    t = mp.mpf(t)
    show(f"tau({t})", mp.quad(lambda s: nu(s) ** 2 * a1(s) ** 2, [t, T]) / 2)
w = sig ** 2 * (1 - mp.exp(-2 * kap * T)) / (2 * kap)
sd = mp.sqrt(w)
show("BS ATM call table-1", mp.ncdf(sd / 2) - mp.ncdf(-sd / 2))
show("deterministic varswap", w / T)
