import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    environment: "jsdom",
    // integration.test.ts spawns the backend; keep files sequential so
    // the three live-service tests run in source order on one server.
    fileParallelism: false,
    testTimeout: 20000,
  },
});
