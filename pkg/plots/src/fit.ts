/** Least-squares slope of y against x. */
export function leastSquaresSlope(x: number[], y: number[]): number {
  if (x.length !== y.length || x.length < 2) {
    throw new Error("slope fit needs two equal-length samples at least");
  }
  const n = x.length;
  const mx = x.reduce((a, b) => a + b, 0) / n;
  const my = y.reduce((a, b) => a + b, 0) / n;
  let sxy = 0;
  let sxx = 0;
  for (let i = 0; i < n; i++) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

/** Convergence rate: negative slope of log(err) against log(n). */
export function fitRate(ns: number[], errs: number[]): number {
  return -leastSquaresSlope(ns.map(Math.log), errs.map(Math.log));
}
