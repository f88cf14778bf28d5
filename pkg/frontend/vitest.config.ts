import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "jsdom",
    globalSetup: ["tests/setup.server.ts"],
    testTimeout: 60_000,
    hookTimeout: 120_000,
  },
});
