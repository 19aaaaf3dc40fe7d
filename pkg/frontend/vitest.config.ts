import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    environment: "node",
    // the e2e test boots the backing service in a subprocess
    testTimeout: 30_000,
    hookTimeout: 30_000,
  },
});
