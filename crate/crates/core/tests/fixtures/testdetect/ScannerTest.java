public class ScannerTest {
    public void testPending() {
        if (true) {
    }
}
