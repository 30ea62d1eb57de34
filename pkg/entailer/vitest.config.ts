import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["test/**/*.test.ts"],
    testTimeout: 600_000,
    hookTimeout: 600_000,
    // tfjs keeps global state; a single fork avoids double backend init
    pool: "forks",
    poolOptions: { forks: { singleFork: true } },
  },
});
