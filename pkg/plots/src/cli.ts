#!/usr/bin/env node
/** plot profile|converge|field2d <inputs...> -o <out.svg>
 *
 * Reads entrofilt harness CSVs and writes SVG figures; the CSV schema is
 * the only contract with the solver side. */

import { plotConvergence, plotField2d, plotProfile } from "./plots.js";

function usage(): never {
  process.stderr.write(
    "usage:\n" +
      "  plot profile <solution.csv> <reference.csv> -o <out.svg>\n" +
      "  plot converge <convergence.csv> -o <out.svg>\n" +
      "  plot field2d <solution.csv> -o <out.svg>\n",
  );
  process.exit(1);
}

export function main(argv: string[]): number {
  const args = [...argv];
  const oIdx = args.indexOf("-o");
  if (oIdx < 0 || oIdx + 1 >= args.length) usage();
  const out = args[oIdx + 1];
  args.splice(oIdx, 2);
  const [kind, ...inputs] = args;
  if (!out.endsWith(".svg")) {
    process.stderr.write(`note: output is SVG content regardless of extension (${out})\n`);
  }
  try {
    switch (kind) {
      case "profile":
        if (inputs.length !== 2) usage();
        plotProfile(inputs[0], inputs[1], out);
        break;
      case "converge":
        if (inputs.length !== 1) usage();
        plotConvergence(inputs[0], out);
        break;
      case "field2d":
        if (inputs.length !== 1) usage();
        plotField2d(inputs[0], out);
        break;
      default:
        usage();
    }
  } catch (err) {
    process.stderr.write(`error: ${err instanceof Error ? err.message : String(err)}\n`);
    return 1;
  }
  process.stdout.write(`wrote ${out}\n`);
  return 0;
}

if (process.argv[1] && /cli\.(ts|js)$/.test(process.argv[1])) {
  process.exit(main(process.argv.slice(2)));
}
